#include "core/config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "core/errors.hpp"
#include "core/text.hpp"

namespace rq::cfg {

namespace {

enum class Type { F64, U64, I32, Bool, Choice, F64List, IntList, AutoF64 };

struct Key {
  const char* name;
  Type type;
  const char* default_value;
  const char* choices = nullptr;  // comma separated, for Type::Choice
};

// Single source of truth for every configurable value and its default.
const Key kSchema[] = {
    {"run.algorithm", Type::Choice, "ar-ddpg", "ar-ddpg,ddpg"},
    {"run.seed", Type::U64, "1"},
    {"run.eval_threads", Type::I32, "0"},

    {"sim.mass", Type::F64, "1.5"},
    {"sim.arm_half_length", Type::F64, "0.13"},
    {"sim.gravity", Type::F64, "9.81"},
    {"sim.inertia_xx", Type::AutoF64, "auto"},
    {"sim.inertia_yy", Type::AutoF64, "auto"},
    {"sim.inertia_zz", Type::AutoF64, "auto"},
    {"sim.thrust_min", Type::F64, "0"},
    {"sim.thrust_max", Type::F64, "15"},
    {"sim.torque_ratio", Type::F64, "0.016"},
    {"sim.motor_lag_tau", Type::F64, "0.001"},
    {"sim.dt", Type::F64, "0.01"},

    {"env.goal_x", Type::F64, "0"},
    {"env.goal_y", Type::F64, "0"},
    {"env.goal_z", Type::F64, "5"},
    {"env.init_cube_half", Type::F64, "1"},
    {"env.bound_cube_half", Type::F64, "1"},
    {"env.max_steps", Type::I32, "1500"},
    {"env.init_angle_bound", Type::F64, "1.0471975511965976"},
    {"env.init_speed_max", Type::F64, "1"},
    {"env.init_rate_max", Type::F64, "1"},
    {"env.scale_inertia_with_mass", Type::Bool, "true"},

    {"reward.beta", Type::F64, "2"},
    {"reward.alpha_a", Type::F64, "0.025"},
    {"reward.alpha_p", Type::F64, "1"},
    {"reward.alpha_v", Type::F64, "0.05"},
    {"reward.alpha_omega", Type::F64, "0.001"},
    {"reward.alpha_xi", Type::F64, "0.02"},
    {"reward.alpha_rho", Type::F64, "0.02"},

    {"nn.hidden", Type::IntList, "64,64"},

    {"hp.total_iterations", Type::U64, "2000000"},
    {"hp.lr_actor", Type::F64, "2e-05"},
    {"hp.lr_critic", Type::F64, "0.0002"},
    {"hp.adam_beta1", Type::F64, "0.9"},
    {"hp.adam_beta2", Type::F64, "0.999"},
    {"hp.adam_eps", Type::F64, "1e-08"},
    {"hp.gamma", Type::F64, "0.95"},
    {"hp.batch_size", Type::I32, "64"},
    {"hp.alpha", Type::F64, "0.1"},
    {"hp.buffer_capacity", Type::U64, "800000"},
    {"hp.policy_steps", Type::I32, "20"},
    {"hp.tau", Type::F64, "0.005"},
    {"hp.babble_episodes", Type::I32, "500"},
    {"hp.ou_theta", Type::F64, "0.15"},
    {"hp.ou_sigma", Type::F64, "0.2"},
    {"hp.ou_sigma_final", Type::F64, "0.05"},
    {"hp.second_critic_update", Type::Bool, "true"},
    {"hp.eval_interval", Type::I32, "5000"},
    {"hp.eval_episodes", Type::I32, "5"},

    {"grid.mass_ratios", Type::F64List, "0.5,0.6,0.7,0.8,0.9,1,1.2,1.4,1.6,1.8,2"},
    {"grid.deltas", Type::F64List, "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5"},
    {"grid.episodes_per_cell", Type::I32, "10"},
};

constexpr int kKeyCount = static_cast<int>(sizeof(kSchema) / sizeof(kSchema[0]));

int key_index(const std::string& name) {
  for (int i = 0; i < kKeyCount; ++i)
    if (name == kSchema[i].name) return i;
  return -1;
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const auto item = trim(text.substr(start, i - start));
      if (!item.empty()) out.push_back(item);
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" +
                    value + "'");
}

void validate_value(const Key& key, const std::string& value) {
  const std::string name = key.name;
  switch (key.type) {
    case Type::F64: {
      double v;
      if (!parse_double(value, v) || !std::isfinite(v))
        bad_value(name, value, "a finite number");
      break;
    }
    case Type::AutoF64: {
      if (value == "auto") break;
      double v;
      if (!parse_double(value, v) || !std::isfinite(v))
        bad_value(name, value, "a finite number or 'auto'");
      break;
    }
    case Type::U64: {
      unsigned long long v;
      if (!parse_u64(value, v)) bad_value(name, value, "a non-negative integer");
      break;
    }
    case Type::I32: {
      unsigned long long v;
      bool neg = !value.empty() && value[0] == '-';
      if (neg || !parse_u64(value, v) || v > 2'000'000'000ull)
        bad_value(name, value, "a non-negative integer");
      break;
    }
    case Type::Bool: {
      if (value != "true" && value != "false")
        bad_value(name, value, "'true' or 'false'");
      break;
    }
    case Type::Choice: {
      for (auto choice : split_list(key.choices))
        if (value == choice) return;
      bad_value(name, value, std::string("one of {") + key.choices + "}");
    }
    case Type::F64List: {
      const auto items = split_list(value);
      if (items.empty()) bad_value(name, value, "a comma-separated number list");
      for (auto item : items) {
        double v;
        if (!parse_double(item, v) || !std::isfinite(v))
          bad_value(name, value, "a comma-separated number list");
      }
      break;
    }
    case Type::IntList: {
      const auto items = split_list(value);
      if (items.empty()) bad_value(name, value, "a comma-separated integer list");
      for (auto item : items) {
        unsigned long long v;
        if (!parse_u64(item, v) || v == 0 || v > 65536)
          bad_value(name, value, "a comma-separated list of widths in [1, 65536]");
      }
      break;
    }
  }
}

}  // namespace

Config::Config() {
  values_.reserve(kKeyCount);
  for (const Key& k : kSchema) values_.push_back(k.default_value);
}

Config Config::defaults() { return Config{}; }

void Config::load_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  load_stream(is, path);
}

void Config::load_stream(std::istream& is, const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + std::string(text) + "'");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    try {
      set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void Config::set(const std::string& key, const std::string& value) {
  const int idx = key_index(key);
  if (idx < 0) throw ConfigError("unknown config key '" + key + "'");
  validate_value(kSchema[idx], value);
  values_[static_cast<size_t>(idx)] = value;
}

const std::string& Config::get(const std::string& key) const {
  const int idx = key_index(key);
  if (idx < 0) throw ConfigError("unknown config key '" + key + "'");
  return values_[static_cast<size_t>(idx)];
}

bool Config::has(const std::string& key) const { return key_index(key) >= 0; }

void Config::write(std::ostream& os) const {
  for (int i = 0; i < kKeyCount; ++i)
    os << kSchema[i].name << " = " << values_[static_cast<size_t>(i)] << "\n";
}

void Config::write_file(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot write config file: " + path);
  write(os);
  if (!os) throw IoError("write failed: " + path);
}

std::vector<std::string> Config::known_keys() {
  std::vector<std::string> keys;
  keys.reserve(kKeyCount);
  for (const Key& k : kSchema) keys.emplace_back(k.name);
  return keys;
}

namespace {

double get_f64(const Config& c, const char* key) {
  double v = 0.0;
  parse_double(c.get(key), v);
  return v;
}

std::uint64_t get_u64(const Config& c, const char* key) {
  unsigned long long v = 0;
  parse_u64(c.get(key), v);
  return v;
}

int get_i32(const Config& c, const char* key) {
  return static_cast<int>(get_u64(c, key));
}

bool get_bool(const Config& c, const char* key) { return c.get(key) == "true"; }

std::vector<double> get_f64_list(const Config& c, const char* key) {
  std::vector<double> out;
  for (auto item : split_list(c.get(key))) {
    double v = 0.0;
    parse_double(item, v);
    out.push_back(v);
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

Resolved Config::resolve() const {
  Resolved r;

  sim::QuadParams& p = r.world.params;
  p.mass = get_f64(*this, "sim.mass");
  p.arm_half_length = get_f64(*this, "sim.arm_half_length");
  p.gravity = get_f64(*this, "sim.gravity");
  p.thrust_min = get_f64(*this, "sim.thrust_min");
  p.thrust_max = get_f64(*this, "sim.thrust_max");
  p.torque_ratio = get_f64(*this, "sim.torque_ratio");
  p.motor_lag_tau = get_f64(*this, "sim.motor_lag_tau");
  p.dt = get_f64(*this, "sim.dt");
  require(p.mass > 0.0, "sim.mass must be > 0");
  require(p.arm_half_length > 0.0, "sim.arm_half_length must be > 0");
  require(p.dt > 0.0, "sim.dt must be > 0");
  require(p.motor_lag_tau >= 0.0, "sim.motor_lag_tau must be >= 0");
  require(p.thrust_min >= 0.0, "sim.thrust_min must be >= 0");
  require(p.thrust_max > p.thrust_min, "sim.thrust_max must be > sim.thrust_min");

  const Vec3 auto_inertia = sim::default_inertia(p.mass, p.arm_half_length);
  const char* inertia_keys[3] = {"sim.inertia_xx", "sim.inertia_yy", "sim.inertia_zz"};
  for (int i = 0; i < 3; ++i) {
    const std::string& text = get(inertia_keys[i]);
    p.inertia_diag[i] = text == "auto" ? auto_inertia[i] : [&] {
      double v = 0.0;
      parse_double(text, v);
      return v;
    }();
    require(p.inertia_diag[i] > 0.0, std::string(inertia_keys[i]) + " must be > 0");
  }

  env::TaskConfig& t = r.world.task;
  t.goal_position = {get_f64(*this, "env.goal_x"), get_f64(*this, "env.goal_y"),
                     get_f64(*this, "env.goal_z")};
  t.init_cube_half = get_f64(*this, "env.init_cube_half");
  t.bound_cube_half = get_f64(*this, "env.bound_cube_half");
  t.max_steps = get_i32(*this, "env.max_steps");
  t.init_angle_bound = get_f64(*this, "env.init_angle_bound");
  t.init_speed_max = get_f64(*this, "env.init_speed_max");
  t.init_rate_max = get_f64(*this, "env.init_rate_max");
  require(t.init_cube_half >= 0.0, "env.init_cube_half must be >= 0");
  require(t.bound_cube_half > 0.0, "env.bound_cube_half must be > 0");
  require(t.max_steps >= 1, "env.max_steps must be >= 1");
  require(t.init_angle_bound >= 0.0, "env.init_angle_bound must be >= 0");
  require(t.init_speed_max >= 0.0, "env.init_speed_max must be >= 0");
  require(t.init_rate_max >= 0.0, "env.init_rate_max must be >= 0");

  env::RewardCoeffs& c = r.world.coeffs;
  c.beta = get_f64(*this, "reward.beta");
  c.alpha_a = get_f64(*this, "reward.alpha_a");
  c.alpha_p = get_f64(*this, "reward.alpha_p");
  c.alpha_v = get_f64(*this, "reward.alpha_v");
  c.alpha_omega = get_f64(*this, "reward.alpha_omega");
  c.alpha_xi = get_f64(*this, "reward.alpha_xi");
  c.alpha_rho = get_f64(*this, "reward.alpha_rho");
  require(c.beta >= 0.0, "reward.beta must be >= 0");
  for (double v : {c.alpha_a, c.alpha_p, c.alpha_v, c.alpha_omega, c.alpha_xi, c.alpha_rho})
    require(v >= 0.0, "reward coefficients must be >= 0");

  r.world.scale_inertia_with_mass = get_bool(*this, "env.scale_inertia_with_mass");

  for (auto item : split_list(get("nn.hidden"))) {
    unsigned long long v = 0;
    parse_u64(item, v);
    r.hidden.push_back(static_cast<int>(v));
  }

  agent::Hyperparams& hp = r.hp;
  hp.total_iterations = get_u64(*this, "hp.total_iterations");
  hp.lr_actor = get_f64(*this, "hp.lr_actor");
  hp.lr_critic = get_f64(*this, "hp.lr_critic");
  hp.adam_beta1 = get_f64(*this, "hp.adam_beta1");
  hp.adam_beta2 = get_f64(*this, "hp.adam_beta2");
  hp.adam_eps = get_f64(*this, "hp.adam_eps");
  hp.gamma = get_f64(*this, "hp.gamma");
  hp.batch_size = get_i32(*this, "hp.batch_size");
  hp.alpha = get_f64(*this, "hp.alpha");
  hp.buffer_capacity = get_u64(*this, "hp.buffer_capacity");
  hp.policy_steps = get_i32(*this, "hp.policy_steps");
  hp.tau = get_f64(*this, "hp.tau");
  hp.babble_episodes = get_i32(*this, "hp.babble_episodes");
  hp.ou_theta = get_f64(*this, "hp.ou_theta");
  hp.ou_sigma = get_f64(*this, "hp.ou_sigma");
  hp.ou_sigma_final = get_f64(*this, "hp.ou_sigma_final");
  hp.second_critic_update = get_bool(*this, "hp.second_critic_update");
  hp.eval_interval = get_i32(*this, "hp.eval_interval");
  hp.eval_episodes = get_i32(*this, "hp.eval_episodes");
  require(hp.total_iterations >= 1, "hp.total_iterations must be >= 1");
  require(hp.lr_actor > 0.0, "hp.lr_actor must be > 0");
  require(hp.lr_critic > 0.0, "hp.lr_critic must be > 0");
  require(hp.gamma >= 0.0 && hp.gamma < 1.0, "hp.gamma must be in [0, 1)");
  require(hp.batch_size >= 1, "hp.batch_size must be >= 1");
  require(hp.alpha >= 0.0 && hp.alpha <= 1.0, "hp.alpha must be in [0, 1]");
  require(hp.buffer_capacity >= 1, "hp.buffer_capacity must be >= 1");
  require(hp.policy_steps >= 1, "hp.policy_steps must be >= 1");
  require(hp.tau > 0.0 && hp.tau <= 1.0, "hp.tau must be in (0, 1]");
  require(hp.ou_theta > 0.0, "hp.ou_theta must be > 0");
  require(hp.ou_sigma >= 0.0, "hp.ou_sigma must be >= 0");
  require(hp.ou_sigma_final >= 0.0, "hp.ou_sigma_final must be >= 0");

  eval::PerturbGrid& g = r.grid;
  g.mass_ratios = get_f64_list(*this, "grid.mass_ratios");
  g.deltas = get_f64_list(*this, "grid.deltas");
  g.episodes_per_cell = get_i32(*this, "grid.episodes_per_cell");
  for (double m : g.mass_ratios) require(m > 0.0, "grid.mass_ratios must be > 0");
  for (double d : g.deltas)
    require(d >= 0.0 && d <= 1.0, "grid.deltas must be in [0, 1]");
  require(g.episodes_per_cell >= 1, "grid.episodes_per_cell must be >= 1");

  r.seed = get_u64(*this, "run.seed");
  hp.seed = r.seed;
  r.eval_threads = get_i32(*this, "run.eval_threads");
  r.use_adversary = get(std::string("run.algorithm")) == "ar-ddpg";
  return r;
}

}  // namespace rq::cfg
