#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace rq {

inline constexpr double kPi = 3.14159265358979323846;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_mix(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

// xoshiro256++ with hand-rolled distributions. std:: engines and
// distributions are avoided on purpose: their output sequences differ
// between standard library implementations, which would break run-for-run
// reproducibility of training and evaluation artifacts.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  // Named sub-stream of a root seed. Streams derived with distinct id lists
  // are statistically independent, so consumers (env, exploration, replay
  // sampling, per-cell evaluation) never perturb each other's draws.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = hash_mix(seed ^ 0x5851f42d4c957f2dull);
    for (std::uint64_t id : ids) h = hash_mix(h ^ (id * 0x9e3779b97f4a7c15ull + 0x100000001b3ull));
    return Rng(h);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Standard normal via Box-Muller. The spare value is cached, so a pair of
  // draws consumes exactly two uniforms; consumption is deterministic for a
  // fixed call sequence.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform in [0, n) via 128-bit multiply-shift.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream ids used to derive the independent sub-streams of one run.
namespace stream {
inline constexpr std::uint64_t kActorInit = 1;
inline constexpr std::uint64_t kAdversaryInit = 2;
inline constexpr std::uint64_t kCriticInit = 3;
inline constexpr std::uint64_t kTrainEnv = 4;
inline constexpr std::uint64_t kExplore = 5;
inline constexpr std::uint64_t kReplaySample = 6;
inline constexpr std::uint64_t kTrainEval = 7;
inline constexpr std::uint64_t kSweepCell = 8;
}  // namespace stream

}  // namespace rq
