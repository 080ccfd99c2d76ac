#pragma once

#include <cstdint>

#include "core/math3d.hpp"

namespace rq::sim {

// Physical constants of the vehicle and world. Defaults model a 1.5 kg
// X-frame quadcopter with a 0.26 m motor-to-motor span, thrust commands in
// [0, 15] N per rotor, a 1 ms motor lag and a 10 ms control timestep.
struct QuadParams {
  double mass = 1.5;              // kg
  double arm_half_length = 0.13;  // m, rotor distance from center
  Vec3 inertia_diag = {0.012675, 0.012675, 0.02535};  // kg m^2
  double gravity = 9.81;          // m/s^2
  double thrust_min = 0.0;        // N
  double thrust_max = 15.0;       // N
  double torque_ratio = 0.016;    // m, propeller torque per unit thrust
  double motor_lag_tau = 0.001;   // s
  double dt = 0.01;               // s
};

// Diagonal inertia of a flat cross: four point masses of mass/4 at the arm
// tips, hull mass concentrated at the origin (zero contribution). Gives
// (m l^2 / 2, m l^2 / 2, m l^2) for both plus- and X-shaped arm layouts.
Vec3 default_inertia(double mass, double arm_half_length);

// Full rigid-body state. rotation maps body-frame vectors to the world
// frame and stays orthonormal (checked to 1e-9) across steps.
struct QuadState {
  Vec3 position;   // m, world frame
  Vec3 velocity;   // m/s, world frame
  Mat3 rotation = Mat3::identity();
  Vec3 body_rates; // rad/s, body frame (p, q, r)
};

struct RotorCommand {
  Vec4 thrusts{};  // N, per rotor

  double total() const {
    return thrusts[0] + thrusts[1] + thrusts[2] + thrusts[3];
  }
};

struct QuadDeriv {
  Vec3 dposition;
  Vec3 dvelocity;
  Mat3 drotation;
  Vec3 dbody_rates;
};

// Body-to-world rotation from roll, pitch, yaw: Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rotation_from_euler(double roll, double pitch, double yaw);

// Inverse of the rotation_from_euler convention for the two penalized
// angles. pitch = -asin(R(2,0)), roll = atan2(R(2,1), R(2,2)).
void roll_pitch_from_rotation(const Mat3& r, double& roll, double& pitch);

// Net body-frame torque of a thrust command: arms mix roll/pitch, the
// propeller drag ratio mixes yaw.
Vec3 body_torque(const RotorCommand& cmd, const QuadParams& params);

QuadDeriv derivatives(const QuadState& state, const RotorCommand& cmd,
                      const QuadParams& params);

// Advances the state by params.dt. Position, velocity and body rates use a
// classical RK4; the rotation is advanced on SO(3) by the exponential map of
// the RK4-integrated body-frame rotation increment and re-orthonormalized,
// so the orthonormality invariant survives arbitrarily long runs.
QuadState step(const QuadState& state, const RotorCommand& cmd,
               const QuadParams& params);

// First-order rotor lag: actual += (dt/tau) * (commanded - actual), with the
// coefficient clamped to <= 1. tau <= dt therefore passes commands through.
RotorCommand motor_lag_filter(const RotorCommand& commanded,
                              const RotorCommand& actual,
                              const QuadParams& params);

// Per-rotor thrust that balances gravity: mass * gravity / 4.
double hover_thrust(const QuadParams& params);

// Maps a normalized action in [-1,1]^4 to rotor thrusts centered on the
// hover thrust, then clamps into [thrust_min, thrust_max]. Inputs outside
// [-1,1] are clamped first; each clamped component bumps *clamp_count when
// a counter is supplied, flagging an upstream bug without failing.
RotorCommand scale_action(const Vec4& action, const QuadParams& params,
                          std::uint64_t* clamp_count = nullptr);

}  // namespace rq::sim
