#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/agent.hpp"
#include "core/env.hpp"
#include "core/eval.hpp"

namespace rq::cfg {

// Typed view of a fully validated configuration.
struct Resolved {
  env::World world;
  agent::Hyperparams hp;
  std::vector<int> hidden;
  eval::PerturbGrid grid;
  std::uint64_t seed = 1;
  int eval_threads = 0;
  bool use_adversary = true;  // run.algorithm
};

// Flat key-value configuration with dotted section prefixes. Every key has
// a default; files and overrides only adjust them. Values are kept as text
// and validated on set; resolve() performs the cross-field checks.
class Config {
 public:
  Config();  // starts from the defaults
  static Config defaults();

  // File syntax: one `key = value` per line, '#' starts a comment.
  void load_file(const std::string& path);
  void load_stream(std::istream& is, const std::string& origin);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;

  // Writes every key in schema order; output is reloadable and stable.
  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;

  Resolved resolve() const;

  static std::vector<std::string> known_keys();

 private:
  std::vector<std::string> values_;  // parallel to the schema
};

}  // namespace rq::cfg
