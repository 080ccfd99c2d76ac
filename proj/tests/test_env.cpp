#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "core/env.hpp"
#include "core/rng.hpp"

using namespace rq;
using namespace rq::env;

namespace {

TaskConfig degenerate_task() {
  TaskConfig t;
  t.init_cube_half = 0.0;
  t.init_angle_bound = 0.0;
  t.init_speed_max = 0.0;
  t.init_rate_max = 0.0;
  return t;
}

Observation obs_from_parts(const Vec3& ep, const Vec3& ev, const Mat3& r, const Vec3& ew) {
  Observation o;
  o.v[0] = ep.x;
  o.v[1] = ep.y;
  o.v[2] = ep.z;
  o.v[3] = ev.x;
  o.v[4] = ev.y;
  o.v[5] = ev.z;
  for (int i = 0; i < 9; ++i) o.v[6 + i] = r.m[i];
  o.v[15] = ew.x;
  o.v[16] = ew.y;
  o.v[17] = ew.z;
  return o;
}

}  // namespace

TEST_CASE("reset: degenerate bounds give the goal state exactly") {
  Rng rng(1);
  const sim::QuadState s = reset(degenerate_task(), rng);
  CHECK(s.position.x == 0.0);
  CHECK(s.position.y == 0.0);
  CHECK(s.position.z == 5.0);
  CHECK(s.velocity.norm() == 0.0);
  CHECK(s.body_rates.norm() == 0.0);
  CHECK(max_abs_diff(s.rotation, Mat3::identity()) == 0.0);
}

TEST_CASE("reset: statistics of the initial-state distribution") {
  const TaskConfig task;
  Rng rng(12345);
  const int n = 100000;
  Vec3 mean{};
  double max_roll = 0.0, max_pitch = 0.0, max_speed = 0.0, max_rate = 0.0;
  bool inside = true;
  for (int i = 0; i < n; ++i) {
    const sim::QuadState s = reset(task, rng);
    mean += s.position;
    const Vec3 e = s.position - task.goal_position;
    inside = inside && std::fabs(e.x) <= 1.0 && std::fabs(e.y) <= 1.0 &&
             std::fabs(e.z) <= 1.0;
    double roll, pitch;
    sim::roll_pitch_from_rotation(s.rotation, roll, pitch);
    max_roll = std::max(max_roll, std::fabs(roll));
    max_pitch = std::max(max_pitch, std::fabs(pitch));
    max_speed = std::max(max_speed, s.velocity.norm());
    max_rate = std::max(max_rate, s.body_rates.norm());
  }
  mean = mean / n;
  // per-axis mean within 3 sigma of the goal coordinate
  const double band = 3.0 * (1.0 / std::sqrt(3.0)) / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(mean.x - 0.0) < band);
  CHECK(std::fabs(mean.y - 0.0) < band);
  CHECK(std::fabs(mean.z - 5.0) < band);
  CHECK(inside);
  CHECK(max_roll <= kPi / 3.0 + 1e-12);
  CHECK(max_pitch <= kPi / 3.0 + 1e-12);
  CHECK(max_roll > kPi / 3.0 - 0.05);  // the bound is actually reached
  CHECK(max_speed <= 1.0 + 1e-12);
  CHECK(max_rate <= 1.0 + 1e-12);
  CHECK(max_speed > 0.95);
}

TEST_CASE("observe: goal state maps to the neutral observation") {
  const TaskConfig task;
  sim::QuadState s;
  s.position = task.goal_position;
  const Observation o = observe(s, task);
  for (int i = 0; i < 6; ++i) CHECK(o.v[i] == 0.0);
  CHECK(max_abs_diff(o.rotation(), Mat3::identity()) == 0.0);
  for (int i = 15; i < 18; ++i) CHECK(o.v[i] == 0.0);
}

TEST_CASE("observe: position error is definitional") {
  const TaskConfig task;
  sim::QuadState s;
  s.position = task.goal_position + Vec3{1, 0, 0};
  const Observation o = observe(s, task);
  CHECK(o.position_error().x == 1.0);
  CHECK(o.position_error().y == 0.0);
  CHECK(o.position_error().z == 0.0);
}

TEST_CASE("observe: round-trips the state fields") {
  const TaskConfig task;
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const sim::QuadState s = reset(task, rng);
    const Observation o = observe(s, task);
    const Vec3 pos = o.position_error() + task.goal_position;
    CHECK((pos - s.position).norm() == 0.0);
    CHECK((o.velocity_error() - s.velocity).norm() == 0.0);
    CHECK((o.rate_error() - s.body_rates).norm() == 0.0);
    CHECK(max_abs_diff(o.rotation(), s.rotation) == 0.0);
  }
}

TEST_CASE("reward: spot values with the default coefficients") {
  const RewardCoeffs coeffs;
  const Observation zero = obs_from_parts({}, {}, Mat3::identity(), {});
  CHECK(reward(zero, {0, 0, 0, 0}, coeffs) == 2.0);

  const Observation ep = obs_from_parts({1, 0, 0}, {}, Mat3::identity(), {});
  CHECK(reward(ep, {0, 0, 0, 0}, coeffs) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(reward(zero, {1, 1, 1, 1}, coeffs) == doctest::Approx(1.95).epsilon(1e-15));
}

TEST_CASE("reward: bounded by beta, equality only at the neutral point") {
  const RewardCoeffs coeffs;
  Rng rng(55);
  const TaskConfig task;
  for (int trial = 0; trial < 2000; ++trial) {
    const sim::QuadState s = reset(task, rng);
    const Observation o = observe(s, task);
    const Vec4 a = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                    rng.uniform(-1, 1)};
    const double r = reward(o, a, coeffs);
    CHECK(r <= coeffs.beta);
    const double penalty_mass = o.position_error().norm() + norm(a);
    if (penalty_mass > 1e-6) CHECK(r < coeffs.beta);
  }
}

TEST_CASE("reward: monotone non-increasing in each error norm") {
  const RewardCoeffs coeffs;
  const Mat3 tilted = sim::rotation_from_euler(0.4, -0.3, 0.2);
  const Observation base = obs_from_parts({0.5, -0.2, 0.1}, {0.3, 0, 0}, tilted, {0.1, 0.2, 0});
  const double r0 = reward(base, {0.1, 0.1, 0.1, 0.1}, coeffs);

  Observation worse = base;
  for (int i = 0; i < 3; ++i) worse.v[i] *= 2.0;  // position error doubled
  CHECK(reward(worse, {0.1, 0.1, 0.1, 0.1}, coeffs) < r0);

  worse = base;
  for (int i = 3; i < 6; ++i) worse.v[i] *= 3.0;  // velocity error tripled
  CHECK(reward(worse, {0.1, 0.1, 0.1, 0.1}, coeffs) < r0);

  worse = base;
  for (int i = 15; i < 18; ++i) worse.v[i] *= 5.0;  // rate error
  CHECK(reward(worse, {0.1, 0.1, 0.1, 0.1}, coeffs) < r0);

  CHECK(reward(base, {0.5, 0.5, 0.5, 0.5}, coeffs) < r0);  // action norm
}

TEST_CASE("terminated") {
  const TaskConfig task;
  sim::QuadState s;
  s.position = task.goal_position;
  CHECK_FALSE(terminated(s, 0, task));

  s.position = task.goal_position + Vec3{1.01, 0, 0};
  CHECK(terminated(s, 0, task));

  s.position = task.goal_position;
  CHECK(terminated(s, 1500, task));
  CHECK_FALSE(terminated(s, 1499, task));
}

TEST_CASE("perturb_action: delta=1 law and range") {
  Rng rng(1001);
  const int n = 100000;
  Vec4 sum{};
  Vec4 sum_sq{};
  bool in_range = true;
  for (int i = 0; i < n; ++i) {
    const Vec4 out = perturb_action({0, 0, 0, 0}, 1.0, rng);
    for (int k = 0; k < 4; ++k) {
      in_range = in_range && out[k] >= -1.0 && out[k] <= 1.0;
      sum[k] += out[k];
      sum_sq[k] += out[k] * out[k];
    }
  }
  CHECK(in_range);
  const double band = 3.0 * (1.0 / std::sqrt(3.0)) / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < 4; ++k) {
    CHECK(std::fabs(sum[k] / n) < band);
    CHECK(sum_sq[k] / n == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  }
}

TEST_CASE("perturb_action: delta=0 is the identity and draws nothing") {
  Rng rng(42), twin(42);
  const Vec4 a = {0.5, -0.5, 0.25, 0.0};
  const Vec4 out = perturb_action(a, 0.0, rng);
  for (int k = 0; k < 4; ++k) CHECK(out[k] == a[k]);
  CHECK(rng.next() == twin.next());  // no draws consumed
}

TEST_CASE("perturb_action: per-step perturbation frequency matches delta") {
  Rng rng(77);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    bool perturbed = false;
    (void)perturb_action({0, 0, 0, 0}, 0.25, rng, &perturbed);
    hits += perturbed ? 1 : 0;
  }
  const double p_hat = static_cast<double>(hits) / n;
  CHECK(std::fabs(p_hat - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("env_step: nominal cell reproduces the training transition") {
  World world;
  Rng rng_env(3);
  const sim::QuadState s0 = reset(world.task, rng_env);
  const Vec4 a = {0.1, -0.1, 0.05, 0.0};

  Rng r1(9), r2(9);
  const StepResult nominal = env_step(s0, 0, a, {1.0, 0.0}, world, r1);
  // same transition computed through the raw sim path
  sim::RotorCommand cmd = sim::scale_action(a, world.params);
  const sim::QuadState next = sim::step(s0, cmd, world.params);
  CHECK(std::memcmp(&nominal.next.position, &next.position, sizeof(Vec3)) == 0);
  CHECK(std::memcmp(nominal.next.rotation.m.data(), next.rotation.m.data(),
                    9 * sizeof(double)) == 0);

  const StepResult again = env_step(s0, 0, a, {1.0, 0.0}, world, r2);
  CHECK(std::memcmp(&nominal.next.position, &again.next.position, sizeof(Vec3)) == 0);
  CHECK(nominal.reward == again.reward);
}

TEST_CASE("env_step: doubled mass under hover thrust falls at g/2") {
  World world;
  sim::QuadState s0;
  s0.position = world.task.goal_position;
  Rng rng(1);
  const StepResult res = env_step(s0, 0, {0, 0, 0, 0}, {2.0, 0.0}, world, rng);
  const double expected_vz = -0.5 * world.params.gravity * world.params.dt;
  CHECK(res.next.velocity.z == doctest::Approx(expected_vz).epsilon(1e-12));
  CHECK(res.next.velocity.x == doctest::Approx(0.0));
  CHECK(res.next.body_rates.norm() == 0.0);
}

TEST_CASE("env_step: out-of-range actions are clamped and counted") {
  World world;
  EnvCounters counters;
  Rng rng(2);
  sim::QuadState s0;
  s0.position = world.task.goal_position;
  const StepResult a = env_step(s0, 0, {2.0, 0.0, 0.0, 0.0}, {1.0, 0.0}, world, rng,
                                nullptr, &counters);
  CHECK(counters.clamped_action_components == 1);
  Rng rng2(2);
  const StepResult b = env_step(s0, 0, {1.0, 0.0, 0.0, 0.0}, {1.0, 0.0}, world, rng2);
  CHECK(a.reward == b.reward);
  CHECK(std::memcmp(&a.next.position, &b.next.position, sizeof(Vec3)) == 0);
}

TEST_CASE("episodes with equal seeds and actions are identical") {
  World world;
  const PerturbConfig pc{1.3, 0.4};

  std::vector<Vec4> actions;
  Rng arng(15);
  for (int i = 0; i < 120; ++i)
    actions.push_back({arng.uniform(-1, 1), arng.uniform(-1, 1), arng.uniform(-1, 1),
                       arng.uniform(-1, 1)});

  auto run = [&](std::uint64_t seed) {
    Episode ep(world);
    Rng rng(seed);
    ep.reset(rng);
    std::vector<double> zs;
    for (const auto& a : actions) {
      if (ep.done()) break;
      ep.step(a, pc, rng);
      zs.push_back(ep.state().position.z);
    }
    zs.push_back(ep.undiscounted_return());
    return zs;
  };

  const auto t1 = run(500);
  const auto t2 = run(500);
  REQUIRE(t1.size() == t2.size());
  bool identical = true;
  for (size_t i = 0; i < t1.size(); ++i) identical = identical && t1[i] == t2[i];
  CHECK(identical);

  const auto t3 = run(501);
  CHECK(t3 != t1);
}

TEST_CASE("episode return is bounded by beta * max_steps") {
  World world;
  world.task.max_steps = 50;
  Episode ep(world);
  Rng rng(88);
  ep.reset(rng);
  while (!ep.done()) ep.step({0, 0, 0, 0}, {1.0, 0.0}, rng);
  CHECK(ep.undiscounted_return() <= world.coeffs.beta * world.task.max_steps);
  CHECK(ep.step_count() <= world.task.max_steps);
}
