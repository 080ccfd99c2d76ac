#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "core/checkpoint.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace rq;
using namespace rq::nn;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Checkpoint random_checkpoint(Rng& rng) {
  Checkpoint ckpt;
  const std::vector<int> pi_dims = {18, 16, 4};
  const std::vector<int> q_dims = {22, 16, 1};
  ckpt.nets.push_back({Role::Actor, mlp_init(pi_dims, Activation::Tanh,
                                             Activation::Tanh, rng, 1e-3)});
  ckpt.nets.push_back({Role::Adversary, mlp_init(pi_dims, Activation::Tanh,
                                                 Activation::Tanh, rng, 1e-3)});
  ckpt.nets.push_back({Role::Critic, mlp_init(q_dims, Activation::Tanh,
                                              Activation::Linear, rng)});
  ckpt.nets.push_back({Role::ActorTarget, ckpt.nets[0].net});
  ckpt.nets.push_back({Role::AdversaryTarget, ckpt.nets[1].net});
  ckpt.nets.push_back({Role::CriticTarget, ckpt.nets[2].net});
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint round-trips bit exactly") {
  Rng rng(2718);
  const Checkpoint ckpt = random_checkpoint(rng);
  const std::string path = temp_path("rq_ckpt_roundtrip.rqc");
  checkpoint_save(ckpt, path);
  const Checkpoint loaded = checkpoint_load(path);

  REQUIRE(loaded.nets.size() == ckpt.nets.size());
  for (size_t n = 0; n < ckpt.nets.size(); ++n) {
    CHECK(loaded.nets[n].role == ckpt.nets[n].role);
    const Mlp& a = ckpt.nets[n].net;
    const Mlp& b = loaded.nets[n].net;
    REQUIRE(a.layer_dims == b.layer_dims);
    CHECK(a.output_activation == b.output_activation);
    for (int l = 0; l < a.layer_count(); ++l) {
      for (size_t i = 0; i < a.weights[l].a.size(); ++i)
        CHECK(a.weights[l].a[i] == b.weights[l].a[i]);
      for (size_t i = 0; i < a.biases[l].size(); ++i)
        CHECK(a.biases[l][i] == b.biases[l][i]);
    }
  }
  CHECK(loaded.find(Role::Actor) != nullptr);
  CHECK(loaded.find(Role::Critic) != nullptr);
  std::remove(path.c_str());
}

TEST_CASE("saving twice produces identical bytes") {
  Rng rng(3141);
  const Checkpoint ckpt = random_checkpoint(rng);
  const std::string p1 = temp_path("rq_ckpt_a.rqc");
  const std::string p2 = temp_path("rq_ckpt_b.rqc");
  checkpoint_save(ckpt, p1);
  checkpoint_save(ckpt, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), {});
  const std::string b2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(b1 == b2);
  CHECK(!b1.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("truncated checkpoint reports truncation, not a crash") {
  Rng rng(1);
  const Checkpoint ckpt = random_checkpoint(rng);
  const std::string path = temp_path("rq_ckpt_trunc.rqc");
  checkpoint_save(ckpt, path);
  const auto full = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full / 2);
  try {
    (void)checkpoint_load(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.kind == FormatError::Kind::Truncated);
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("wrong magic is a distinct format error") {
  const std::string path = temp_path("rq_ckpt_magic.rqc");
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTACKPTFILE----------------";
  }
  try {
    (void)checkpoint_load(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.kind == FormatError::Kind::BadMagic);
  }
  std::remove(path.c_str());
}

TEST_CASE("version mismatch names both versions") {
  Rng rng(7);
  const Checkpoint ckpt = random_checkpoint(rng);
  const std::string path = temp_path("rq_ckpt_version.rqc");
  checkpoint_save(ckpt, path);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(6);  // version lives right after the 6-byte magic
    const char bumped[4] = {9, 0, 0, 0};
    f.write(bumped, 4);
  }
  try {
    (void)checkpoint_load(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.kind == FormatError::Kind::BadVersion);
    const std::string msg = e.what();
    CHECK(msg.find("9") != std::string::npos);
    CHECK(msg.find("1") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("missing file is an io error") {
  CHECK_THROWS_AS((void)checkpoint_load(temp_path("rq_ckpt_missing.rqc")), IoError);
}
