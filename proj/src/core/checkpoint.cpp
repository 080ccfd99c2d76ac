#include "core/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/errors.hpp"

namespace rq::nn {

namespace {

constexpr char kMagic[6] = {'R', 'Q', 'C', 'K', 'P', 'T'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

struct Reader {
  std::istream& is;
  const std::string& path;

  void bytes(void* out, size_t n, const char* what) {
    is.read(static_cast<char*>(out), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(is.gcount()) != n)
      throw FormatError(FormatError::Kind::Truncated,
                        path + ": truncated while reading " + what);
  }

  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    bytes(b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  double f64(const char* what) {
    unsigned char b[8];
    bytes(b, 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
  }
};

Activation output_activation_for(Role role) {
  switch (role) {
    case Role::Critic:
    case Role::CriticTarget:
      return Activation::Linear;
    default:
      return Activation::Tanh;
  }
}

}  // namespace

const char* role_name(Role role) {
  switch (role) {
    case Role::Actor: return "actor";
    case Role::Adversary: return "adversary";
    case Role::Critic: return "critic";
    case Role::ActorTarget: return "actor_target";
    case Role::AdversaryTarget: return "adversary_target";
    case Role::CriticTarget: return "critic_target";
  }
  return "unknown";
}

const Mlp* Checkpoint::find(Role role) const {
  for (const auto& e : nets)
    if (e.role == role) return &e.net;
  return nullptr;
}

void checkpoint_save(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(ckpt.nets.size()));
  for (const auto& e : ckpt.nets) {
    const unsigned char role = static_cast<unsigned char>(e.role);
    os.write(reinterpret_cast<const char*>(&role), 1);
    put_u32(os, static_cast<std::uint32_t>(e.net.layer_dims.size()));
    for (int d : e.net.layer_dims) put_u32(os, static_cast<std::uint32_t>(d));
    for (int l = 0; l < e.net.layer_count(); ++l) {
      for (double w : e.net.weights[l].a) put_f64(os, w);
      for (double b : e.net.biases[l]) put_f64(os, b);
    }
  }
  if (!os) throw IoError("write failed: " + path);
}

Checkpoint checkpoint_load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  Reader r{is, path};

  char magic[6];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError(FormatError::Kind::BadMagic,
                      path + ": not a checkpoint file (bad magic)");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion)
    throw FormatError(FormatError::Kind::BadVersion,
                      path + ": checkpoint version " + std::to_string(version) +
                          " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  const std::uint32_t count = r.u32("network count");
  if (count > 64)
    throw FormatError(FormatError::Kind::Malformed,
                      path + ": implausible network count " + std::to_string(count));

  Checkpoint ckpt;
  ckpt.nets.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    unsigned char role_byte = 0;
    r.bytes(&role_byte, 1, "role");
    if (role_byte > static_cast<unsigned char>(Role::CriticTarget))
      throw FormatError(FormatError::Kind::Malformed,
                        path + ": unknown network role " + std::to_string(role_byte));
    const Role role = static_cast<Role>(role_byte);
    const std::uint32_t ndims = r.u32("dim count");
    if (ndims < 2 || ndims > 64)
      throw FormatError(FormatError::Kind::Malformed,
                        path + ": implausible layer count " + std::to_string(ndims));
    Mlp net;
    net.hidden_activation = Activation::Tanh;
    net.output_activation = output_activation_for(role);
    net.layer_dims.resize(ndims);
    for (auto& d : net.layer_dims) {
      const std::uint32_t v = r.u32("layer dim");
      if (v == 0 || v > 1u << 20)
        throw FormatError(FormatError::Kind::Malformed,
                          path + ": implausible layer width " + std::to_string(v));
      d = static_cast<int>(v);
    }
    for (size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
      Matrix w(net.layer_dims[l + 1], net.layer_dims[l]);
      for (double& v : w.a) v = r.f64("weights");
      std::vector<double> b(static_cast<size_t>(net.layer_dims[l + 1]));
      for (double& v : b) v = r.f64("biases");
      net.weights.push_back(std::move(w));
      net.biases.push_back(std::move(b));
    }
    ckpt.nets.push_back({role, std::move(net)});
  }
  return ckpt;
}

}  // namespace rq::nn
