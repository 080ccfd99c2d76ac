#include "core/sim.hpp"

#include <cmath>

namespace rq::sim {

Vec3 default_inertia(double mass, double arm_half_length) {
  const double l2 = arm_half_length * arm_half_length;
  return {0.5 * mass * l2, 0.5 * mass * l2, mass * l2};
}

Mat3 rotation_from_euler(double roll, double pitch, double yaw) {
  const double sx = std::sin(roll), cx = std::cos(roll);
  const double sp = std::sin(pitch), cp = std::cos(pitch);
  const double sy = std::sin(yaw), cy = std::cos(yaw);
  Mat3 r;
  r.m = {cy * cp, sx * sp * cy - sy * cx, sx * sy + sp * cx * cy,
         sy * cp, sx * sy * sp + cx * cy, -sx * cy + sy * sp * cx,
         -sp,     sx * cp,                cx * cp};
  return r;
}

void roll_pitch_from_rotation(const Mat3& r, double& roll, double& pitch) {
  pitch = -std::asin(clamp(r(2, 0), -1.0, 1.0));
  roll = std::atan2(r(2, 1), r(2, 2));
}

Vec3 body_torque(const RotorCommand& cmd, const QuadParams& params) {
  const double f1 = cmd.thrusts[0], f2 = cmd.thrusts[1];
  const double f3 = cmd.thrusts[2], f4 = cmd.thrusts[3];
  const double l = params.arm_half_length;
  return {l * (f1 + f2 - f3 - f4),
          l * (-f1 + f2 + f3 - f4),
          params.torque_ratio * (-f1 + f2 - f3 + f4)};
}

namespace {

Vec3 body_rate_deriv(const Vec3& w, const Vec3& torque, const Vec3& inertia) {
  const Vec3 iw = {inertia.x * w.x, inertia.y * w.y, inertia.z * w.z};
  const Vec3 rhs = torque - w.cross(iw);
  return {rhs.x / inertia.x, rhs.y / inertia.y, rhs.z / inertia.z};
}

Vec3 velocity_deriv(const Mat3& rotation, double thrust_total,
                    const QuadParams& params) {
  const Vec3 body_thrust = {0.0, 0.0, thrust_total};
  return Vec3{0.0, 0.0, -params.gravity} + rotation * body_thrust / params.mass;
}

// Extended stage state for the integrator: sigma is the body-frame rotation
// increment relative to the step's starting attitude, so the attitude at a
// stage is R0 * exp(skew(sigma)).
struct Stage {
  Vec3 position, velocity, sigma, rates;
};

struct StageDeriv {
  Vec3 dposition, dvelocity, dsigma, drates;
};

// Inverse differential of the exponential map for the right-multiplication
// convention R = R0 * exp(skew(sigma)), dR/dt = R * skew(omega):
//   dsigma/dt = omega + 1/2 sigma x omega + 1/12 sigma x (sigma x omega)
// sigma is O(dt) within a step, so the omitted series terms are O(dt^4) in
// the derivative and the overall step stays fourth order.
Vec3 dexpinv(const Vec3& sigma, const Vec3& omega) {
  const Vec3 c1 = sigma.cross(omega);
  const Vec3 c2 = sigma.cross(c1);
  return omega + 0.5 * c1 + (1.0 / 12.0) * c2;
}

StageDeriv eval_stage(const Mat3& r0, const Stage& s, double thrust_total,
                      const Vec3& torque, const QuadParams& params) {
  StageDeriv d;
  d.dposition = s.velocity;
  const Mat3 rotation = r0 * exp_so3(s.sigma);
  d.dvelocity = velocity_deriv(rotation, thrust_total, params);
  d.drates = body_rate_deriv(s.rates, torque, params.inertia_diag);
  d.dsigma = dexpinv(s.sigma, s.rates);
  return d;
}

Stage advance(const Stage& s, const StageDeriv& d, double h) {
  return {s.position + h * d.dposition, s.velocity + h * d.dvelocity,
          s.sigma + h * d.dsigma, s.rates + h * d.drates};
}

}  // namespace

QuadDeriv derivatives(const QuadState& state, const RotorCommand& cmd,
                      const QuadParams& params) {
  QuadDeriv d;
  d.dposition = state.velocity;
  d.dvelocity = velocity_deriv(state.rotation, cmd.total(), params);
  d.drotation = state.rotation * skew(state.body_rates);
  d.dbody_rates =
      body_rate_deriv(state.body_rates, body_torque(cmd, params), params.inertia_diag);
  return d;
}

QuadState step(const QuadState& state, const RotorCommand& cmd,
               const QuadParams& params) {
  const double h = params.dt;
  const double thrust_total = cmd.total();
  const Vec3 torque = body_torque(cmd, params);

  const Stage s0 = {state.position, state.velocity, Vec3{}, state.body_rates};
  const StageDeriv k1 = eval_stage(state.rotation, s0, thrust_total, torque, params);
  const StageDeriv k2 =
      eval_stage(state.rotation, advance(s0, k1, 0.5 * h), thrust_total, torque, params);
  const StageDeriv k3 =
      eval_stage(state.rotation, advance(s0, k2, 0.5 * h), thrust_total, torque, params);
  const StageDeriv k4 =
      eval_stage(state.rotation, advance(s0, k3, h), thrust_total, torque, params);

  const double w = h / 6.0;
  QuadState out;
  out.position = state.position +
                 w * (k1.dposition + 2.0 * k2.dposition + 2.0 * k3.dposition + k4.dposition);
  out.velocity = state.velocity +
                 w * (k1.dvelocity + 2.0 * k2.dvelocity + 2.0 * k3.dvelocity + k4.dvelocity);
  out.body_rates = state.body_rates +
                   w * (k1.drates + 2.0 * k2.drates + 2.0 * k3.drates + k4.drates);
  const Vec3 sigma = w * (k1.dsigma + 2.0 * k2.dsigma + 2.0 * k3.dsigma + k4.dsigma);
  out.rotation = state.rotation * exp_so3(sigma);
  orthonormalize(out.rotation);
  return out;
}

RotorCommand motor_lag_filter(const RotorCommand& commanded,
                              const RotorCommand& actual,
                              const QuadParams& params) {
  double k = 1.0;
  if (params.motor_lag_tau > 0.0) k = std::min(params.dt / params.motor_lag_tau, 1.0);
  RotorCommand out;
  for (int i = 0; i < 4; ++i)
    out.thrusts[i] = actual.thrusts[i] + k * (commanded.thrusts[i] - actual.thrusts[i]);
  return out;
}

double hover_thrust(const QuadParams& params) {
  return params.mass * params.gravity / 4.0;
}

RotorCommand scale_action(const Vec4& action, const QuadParams& params,
                          std::uint64_t* clamp_count) {
  const double fh = hover_thrust(params);
  const double half_span = 0.5 * (params.thrust_max - params.thrust_min);
  RotorCommand cmd;
  for (int i = 0; i < 4; ++i) {
    double a = action[i];
    if (a < -1.0 || a > 1.0) {
      a = clamp(a, -1.0, 1.0);
      if (clamp_count) ++*clamp_count;
    }
    cmd.thrusts[i] = clamp(fh + a * half_span, params.thrust_min, params.thrust_max);
  }
  return cmd;
}

}  // namespace rq::sim
