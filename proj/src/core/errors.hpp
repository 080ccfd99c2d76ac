#pragma once

#include <stdexcept>
#include <string>

namespace rq {

// Error taxonomy shared by the core library, the C API status codes and the
// CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File-format failures keep their cause so callers can distinguish a clipped
// file from a wrong or future format.
struct FormatError : std::runtime_error {
  enum class Kind { BadMagic, BadVersion, Truncated, Malformed };
  Kind kind;
  FormatError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

}  // namespace rq
