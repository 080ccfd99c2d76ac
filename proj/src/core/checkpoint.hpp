#pragma once

#include <string>
#include <vector>

#include "core/nn.hpp"

namespace rq::nn {

enum class Role : unsigned char {
  Actor = 0,
  Adversary = 1,
  Critic = 2,
  ActorTarget = 3,
  AdversaryTarget = 4,
  CriticTarget = 5,
};

const char* role_name(Role role);

struct CheckpointEntry {
  Role role;
  Mlp net;
};

// On-disk layout (all little-endian):
//   magic "RQCKPT" | u32 version (1) | u32 network count
//   per network: u8 role | u32 dim count | u32 dims[] |
//                per layer: f64 weights row-major, then f64 biases
// Doubles round-trip bit-exactly.
struct Checkpoint {
  std::vector<CheckpointEntry> nets;

  const Mlp* find(Role role) const;
};

inline constexpr unsigned kCheckpointVersion = 1;

void checkpoint_save(const Checkpoint& ckpt, const std::string& path);

// Throws FormatError (BadMagic / BadVersion / Truncated / Malformed) or
// IoError when the file cannot be opened.
Checkpoint checkpoint_load(const std::string& path);

}  // namespace rq::nn
