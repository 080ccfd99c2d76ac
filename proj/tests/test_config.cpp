#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/config.hpp"
#include "core/errors.hpp"

using namespace rq;
using namespace rq::cfg;

TEST_CASE("stock defaults pin the reference parameter set") {
  const Resolved r = Config::defaults().resolve();

  // physics
  CHECK(r.world.params.mass == 1.5);
  CHECK(r.world.params.arm_half_length == 0.13);
  CHECK(r.world.params.dt == 0.01);
  CHECK(r.world.params.motor_lag_tau == 0.001);
  CHECK(r.world.params.thrust_min == 0.0);
  CHECK(r.world.params.thrust_max == 15.0);
  CHECK(r.world.params.gravity == 9.81);
  CHECK(r.world.params.inertia_diag.x ==
        doctest::Approx(sim::default_inertia(1.5, 0.13).x));

  // task and reward
  CHECK(r.world.task.goal_position.z == 5.0);
  CHECK(r.world.task.max_steps == 1500);
  CHECK(r.world.task.init_cube_half == 1.0);
  CHECK(r.world.task.init_angle_bound == doctest::Approx(kPi / 3.0));
  CHECK(r.world.coeffs.beta == 2.0);
  CHECK(r.world.coeffs.alpha_a == 0.025);
  CHECK(r.world.coeffs.alpha_p == 1.0);
  CHECK(r.world.coeffs.alpha_v == 0.05);
  CHECK(r.world.coeffs.alpha_omega == 0.001);
  CHECK(r.world.coeffs.alpha_xi == 0.02);
  CHECK(r.world.coeffs.alpha_rho == 0.02);

  // hyperparameters
  CHECK(r.hp.total_iterations == 2000000);
  CHECK(r.hp.lr_actor == 2e-5);
  CHECK(r.hp.lr_critic == 2e-4);
  CHECK(r.hp.adam_beta1 == 0.9);
  CHECK(r.hp.adam_beta2 == 0.999);
  CHECK(r.hp.gamma == 0.95);
  CHECK(r.hp.batch_size == 64);
  CHECK(r.hp.alpha == 0.1);
  CHECK(r.hp.buffer_capacity == 800000);
  CHECK(r.hp.policy_steps == 20);
  CHECK(r.hp.babble_episodes == 500);
  CHECK(r.hp.tau == 0.005);
  CHECK(r.use_adversary);
  CHECK(r.hidden == std::vector<int>{64, 64});

  // test grid
  CHECK(r.grid.mass_ratios ==
        std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0});
  CHECK(r.grid.deltas ==
        std::vector<double>{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5});
  CHECK(r.grid.episodes_per_cell == 10);
}

TEST_CASE("set validates types and key names") {
  Config c = Config::defaults();
  c.set("sim.mass", "2.5");
  CHECK(c.get("sim.mass") == "2.5");

  CHECK_THROWS_AS(c.set("sim.masss", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("sim.mass", "heavy"), ConfigError);
  CHECK_THROWS_AS(c.set("hp.batch_size", "-3"), ConfigError);
  CHECK_THROWS_AS(c.set("run.algorithm", "td3"), ConfigError);
  CHECK_THROWS_AS(c.set("env.scale_inertia_with_mass", "yes"), ConfigError);
  CHECK_THROWS_AS(c.set("grid.deltas", ""), ConfigError);

  try {
    c.set("sim.gravity", "down");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sim.gravity") != std::string::npos);
  }
}

TEST_CASE("resolve enforces cross-field invariants with named fields") {
  Config c = Config::defaults();
  c.set("sim.mass", "-1");
  try {
    (void)c.resolve();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sim.mass") != std::string::npos);
  }

  Config g = Config::defaults();
  g.set("hp.gamma", "1");
  CHECK_THROWS_AS((void)g.resolve(), ConfigError);

  Config d = Config::defaults();
  d.set("grid.deltas", "0.5,1.5");
  CHECK_THROWS_AS((void)d.resolve(), ConfigError);

  Config t = Config::defaults();
  t.set("sim.thrust_max", "0");
  CHECK_THROWS_AS((void)t.resolve(), ConfigError);
}

TEST_CASE("inertia: auto derives from mass, explicit values win") {
  Config c = Config::defaults();
  c.set("sim.mass", "3");
  Resolved r = c.resolve();
  CHECK(r.world.params.inertia_diag.x == doctest::Approx(sim::default_inertia(3, 0.13).x));

  c.set("sim.inertia_xx", "0.05");
  r = c.resolve();
  CHECK(r.world.params.inertia_diag.x == 0.05);
  CHECK(r.world.params.inertia_diag.y == doctest::Approx(sim::default_inertia(3, 0.13).y));
}

TEST_CASE("file loading, comments and override precedence") {
  const auto path = std::filesystem::temp_directory_path() / "rq_cfg_test.cfg";
  {
    std::ofstream os(path);
    os << "# test config\n";
    os << "sim.mass = 2.0   # heavier\n";
    os << "hp.alpha = 0.2\n";
    os << "\n";
    os << "run.algorithm = ddpg\n";
  }
  Config c = Config::defaults();
  c.load_file(path.string());
  CHECK(c.get("sim.mass") == "2.0");
  CHECK(c.get("hp.alpha") == "0.2");
  CHECK(c.get("run.algorithm") == "ddpg");
  CHECK(c.get("hp.gamma") == "0.95");  // untouched default

  c.set("sim.mass", "2.5");  // later override wins
  CHECK(c.resolve().world.params.mass == 2.5);
  std::filesystem::remove(path);
}

TEST_CASE("file loading reports the offending line") {
  const auto path = std::filesystem::temp_directory_path() / "rq_cfg_bad.cfg";
  {
    std::ofstream os(path);
    os << "sim.mass = 1.5\n";
    os << "this is not a key value pair\n";
  }
  Config c = Config::defaults();
  try {
    c.load_file(path.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(c.load_file("/nonexistent/rq.cfg"), IoError);
}

TEST_CASE("snapshot write -> reload reproduces the resolved run") {
  Config c = Config::defaults();
  c.set("sim.mass", "1.75");
  c.set("nn.hidden", "32,16");
  c.set("grid.mass_ratios", "0.5,1,2");
  std::ostringstream snapshot;
  c.write(snapshot);

  Config reloaded = Config::defaults();
  std::istringstream is(snapshot.str());
  reloaded.load_stream(is, "snapshot");
  CHECK(reloaded.get("sim.mass") == "1.75");
  CHECK(reloaded.resolve().hidden == std::vector<int>{32, 16});
  CHECK(reloaded.resolve().grid.mass_ratios == std::vector<double>{0.5, 1.0, 2.0});

  std::ostringstream second;
  reloaded.write(second);
  CHECK(second.str() == snapshot.str());  // snapshots are stable
}
