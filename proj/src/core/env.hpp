#pragma once

#include <array>
#include <cstdint>

#include "core/math3d.hpp"
#include "core/rng.hpp"
#include "core/sim.hpp"

namespace rq::env {

inline constexpr int kObsDim = 18;
inline constexpr int kActionDim = 4;

// Policy input: position error, velocity error, flattened rotation matrix
// (row-major) and body-rate error, concatenated in that order. Errors are
// current minus desired; the desired attitude, velocity and rates are zero.
struct Observation {
  std::array<double, kObsDim> v{};

  Vec3 position_error() const { return {v[0], v[1], v[2]}; }
  Vec3 velocity_error() const { return {v[3], v[4], v[5]}; }
  Mat3 rotation() const {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = v[6 + i];
    return r;
  }
  Vec3 rate_error() const { return {v[15], v[16], v[17]}; }
};

struct RewardCoeffs {
  double beta = 2.0;          // alive bonus
  double alpha_a = 0.025;     // action magnitude
  double alpha_p = 1.0;       // position error
  double alpha_v = 0.05;      // velocity error
  double alpha_omega = 0.001; // body-rate error
  double alpha_xi = 0.02;     // roll error
  double alpha_rho = 0.02;    // pitch error
};

struct TaskConfig {
  Vec3 goal_position = {0.0, 0.0, 5.0};  // m, world frame
  double init_cube_half = 1.0;           // m, initial-position cube half width
  double bound_cube_half = 1.0;          // m, termination cube half width
  int max_steps = 1500;
  double init_angle_bound = kPi / 3.0;   // rad, per Euler angle
  double init_speed_max = 1.0;           // m/s
  double init_rate_max = 1.0;            // rad/s
};

// Test-time plant mismatch: relative mass and the per-step probability of a
// uniform additive action perturbation.
struct PerturbConfig {
  double mass_ratio = 1.0;
  double delta = 0.0;
};

// Everything a transition needs besides the state and the action.
struct World {
  sim::QuadParams params;
  TaskConfig task;
  RewardCoeffs coeffs;
  bool scale_inertia_with_mass = true;
};

struct EnvCounters {
  std::uint64_t clamped_action_components = 0;
  std::uint64_t perturbed_steps = 0;
};

// Samples an initial state: position uniform in the init cube around the
// goal, Euler angles uniform in [-bound, bound], and linear/angular speed
// magnitudes uniform in [0, max] along isotropic random directions.
sim::QuadState reset(const TaskConfig& task, Rng& rng);

Observation observe(const sim::QuadState& state, const TaskConfig& task);

// beta - alpha_a*|a| - alpha_p*|e_p| - alpha_v*|e_v| - alpha_omega*|e_w|
//      - alpha_xi*|roll| - alpha_rho*|pitch|. Yaw is not penalized.
double reward(const Observation& obs, const Vec4& action, const RewardCoeffs& coeffs);

// True once step_index reaches max_steps or the position leaves the
// axis-aligned bound cube centered on the goal.
bool terminated(const sim::QuadState& state, int step_index, const TaskConfig& task);

// With probability delta adds an independent Uniform(-1,1) draw to every
// component, then clamps back into [-1,1]. One Bernoulli per call when
// delta > 0; delta == 0 consumes no randomness.
Vec4 perturb_action(const Vec4& action, double delta, Rng& rng,
                    bool* perturbed = nullptr);

struct StepResult {
  sim::QuadState next;
  Observation obs;  // observation of next
  double reward = 0.0;
  bool done = false;
};

// One MDP transition. step_index is the number of steps already taken in
// the episode. With probability delta every action component receives an
// independent Uniform(-1,1) additive perturbation (then re-clamped); the
// reward is computed from the agent's own pre-perturbation action. The
// plant runs at mass_ratio times the nominal mass (inertia scaled along
// when world.scale_inertia_with_mass), while the action-to-thrust mapping
// keeps the nominal calibration.
StepResult env_step(const sim::QuadState& state, int step_index, Vec4 action,
                    const PerturbConfig& perturb, const World& world, Rng& rng,
                    sim::RotorCommand* motor_state = nullptr,
                    EnvCounters* counters = nullptr);

// Stateful wrapper bundling the quad state, the rotor lag state and the step
// counter of one episode.
class Episode {
 public:
  explicit Episode(const World& world) : world_(world) {}

  void reset(Rng& rng);
  StepResult step(const Vec4& action, const PerturbConfig& perturb, Rng& rng);

  const sim::QuadState& state() const { return state_; }
  const Observation& observation() const { return obs_; }
  int step_count() const { return steps_; }
  bool done() const { return done_; }
  double undiscounted_return() const { return return_; }
  const EnvCounters& counters() const { return counters_; }
  const World& world() const { return world_; }

 private:
  World world_;
  sim::QuadState state_;
  Observation obs_;
  sim::RotorCommand motor_;
  int steps_ = 0;
  bool done_ = false;
  double return_ = 0.0;
  EnvCounters counters_;
};

}  // namespace rq::env
