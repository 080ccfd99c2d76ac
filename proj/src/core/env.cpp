#include "core/env.hpp"

#include <cmath>

namespace rq::env {

namespace {

Vec3 random_unit_vector(Rng& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

}  // namespace

sim::QuadState reset(const TaskConfig& task, Rng& rng) {
  sim::QuadState s;
  for (int i = 0; i < 3; ++i)
    s.position[i] = task.goal_position[i] +
                    rng.uniform(-task.init_cube_half, task.init_cube_half);
  const double roll = rng.uniform(-task.init_angle_bound, task.init_angle_bound);
  const double pitch = rng.uniform(-task.init_angle_bound, task.init_angle_bound);
  const double yaw = rng.uniform(-task.init_angle_bound, task.init_angle_bound);
  s.rotation = sim::rotation_from_euler(roll, pitch, yaw);
  const double speed = rng.uniform(0.0, task.init_speed_max);
  s.velocity = random_unit_vector(rng) * speed;
  const double rate = rng.uniform(0.0, task.init_rate_max);
  s.body_rates = random_unit_vector(rng) * rate;
  return s;
}

Observation observe(const sim::QuadState& state, const TaskConfig& task) {
  Observation o;
  const Vec3 ep = state.position - task.goal_position;
  o.v[0] = ep.x;
  o.v[1] = ep.y;
  o.v[2] = ep.z;
  o.v[3] = state.velocity.x;
  o.v[4] = state.velocity.y;
  o.v[5] = state.velocity.z;
  for (int i = 0; i < 9; ++i) o.v[6 + i] = state.rotation.m[i];
  o.v[15] = state.body_rates.x;
  o.v[16] = state.body_rates.y;
  o.v[17] = state.body_rates.z;
  return o;
}

double reward(const Observation& obs, const Vec4& action, const RewardCoeffs& c) {
  double roll, pitch;
  sim::roll_pitch_from_rotation(obs.rotation(), roll, pitch);
  return c.beta - c.alpha_a * norm(action) - c.alpha_p * obs.position_error().norm() -
         c.alpha_v * obs.velocity_error().norm() -
         c.alpha_omega * obs.rate_error().norm() - c.alpha_xi * std::fabs(roll) -
         c.alpha_rho * std::fabs(pitch);
}

bool terminated(const sim::QuadState& state, int step_index, const TaskConfig& task) {
  if (step_index >= task.max_steps) return true;
  const Vec3 e = state.position - task.goal_position;
  return std::fabs(e.x) > task.bound_cube_half ||
         std::fabs(e.y) > task.bound_cube_half ||
         std::fabs(e.z) > task.bound_cube_half;
}

Vec4 perturb_action(const Vec4& action, double delta, Rng& rng, bool* perturbed) {
  if (perturbed) *perturbed = false;
  Vec4 out = action;
  if (delta > 0.0 && rng.bernoulli(delta)) {
    for (int i = 0; i < 4; ++i)
      out[i] = clamp(out[i] + rng.uniform(-1.0, 1.0), -1.0, 1.0);
    if (perturbed) *perturbed = true;
  }
  return out;
}

StepResult env_step(const sim::QuadState& state, int step_index, Vec4 action,
                    const PerturbConfig& perturb, const World& world, Rng& rng,
                    sim::RotorCommand* motor_state, EnvCounters* counters) {
  Vec4 agent_action = action;
  for (int i = 0; i < 4; ++i) {
    if (agent_action[i] < -1.0 || agent_action[i] > 1.0) {
      agent_action[i] = clamp(agent_action[i], -1.0, 1.0);
      if (counters) ++counters->clamped_action_components;
    }
  }

  bool was_perturbed = false;
  const Vec4 executed = perturb_action(agent_action, perturb.delta, rng, &was_perturbed);
  if (was_perturbed && counters) ++counters->perturbed_steps;

  sim::QuadParams plant = world.params;
  plant.mass *= perturb.mass_ratio;
  if (world.scale_inertia_with_mass) plant.inertia_diag *= perturb.mass_ratio;

  // Thrust mapping keeps the nominal (training-time) calibration; only the
  // plant itself changes under a mass perturbation.
  sim::RotorCommand cmd = sim::scale_action(executed, world.params);
  if (motor_state) {
    cmd = sim::motor_lag_filter(cmd, *motor_state, plant);
    *motor_state = cmd;
  }

  StepResult r;
  r.next = sim::step(state, cmd, plant);
  r.obs = observe(r.next, world.task);
  r.reward = reward(r.obs, agent_action, world.coeffs);
  r.done = terminated(r.next, step_index + 1, world.task);
  return r;
}

void Episode::reset(Rng& rng) {
  state_ = env::reset(world_.task, rng);
  obs_ = observe(state_, world_.task);
  const double fh = sim::hover_thrust(world_.params);
  motor_.thrusts = {fh, fh, fh, fh};
  steps_ = 0;
  done_ = false;
  return_ = 0.0;
}

StepResult Episode::step(const Vec4& action, const PerturbConfig& perturb, Rng& rng) {
  StepResult r = env_step(state_, steps_, action, perturb, world_, rng, &motor_, &counters_);
  state_ = r.next;
  obs_ = r.obs;
  ++steps_;
  done_ = r.done;
  return_ += r.reward;
  return r;
}

}  // namespace rq::env
