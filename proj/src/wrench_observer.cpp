#include "crawl/wrench_observer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crawl {

namespace {

// Divergence guardrail: estimates growing faster than this for longer than
// the window latch the diverged flag (compensation is frozen downstream).
constexpr double kDivergenceRate = 1.0;    // wrench-norm units per second
constexpr double kDivergenceWindow = 2.0;  // seconds

void check_gain(const Mat3& gain, const char* name) {
  if (!gain.allFinite() || (gain - gain.transpose()).norm() > 1e-9) {
    throw std::invalid_argument(std::string(name) + " observer gain must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(gain);
  if (eig.eigenvalues()(0) <= 0.0) {
    throw std::invalid_argument(std::string(name) +
                                " observer gain must be positive definite");
  }
}

}  // namespace

ObserverState observer_step(const ObserverState& state, const CentroidalState& inputs,
                            const ObserverGains& gains, ObserverForm form, double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw std::invalid_argument("observer dt must be positive");
  }
  if (!(inputs.mass > 0)) {
    throw std::invalid_argument("mass must be positive");
  }
  check_gain(gains.linear, "linear");
  check_gain(gains.angular, "angular");

  const Vec3 measured_lin = inputs.mass * inputs.com_velocity;
  const Vec3 measured_ang = inputs.inertia * inputs.omega;

  ObserverState out = state;
  if (!state.initialized) {
    out.momentum_lin = measured_lin;
    out.momentum_ang = measured_ang;
    out.force = Vec3::Zero();
    out.torque = Vec3::Zero();
    out.last_norm = 0.0;
    out.growth_time = 0.0;
    out.diverged = false;
    out.initialized = true;
  }

  Vec3 f_known = inputs.mass * inputs.gravity;
  Vec3 tau_known = Vec3::Zero();
  for (const ContactForce& contact : inputs.contacts) {
    f_known += contact.force;
    tau_known += (contact.position - inputs.com_position).cross(contact.force);
  }
  if (form == ObserverForm::spatial) {
    // Gyroscopic bias v x* (I_bar v) = (m w x v, w x I w).
    f_known -= inputs.mass * inputs.omega.cross(inputs.com_velocity);
    tau_known -= inputs.omega.cross(inputs.inertia * inputs.omega);
  }

  out.momentum_lin += dt * (f_known + out.force);
  out.momentum_ang += dt * (tau_known + out.torque);
  out.force = gains.linear * (measured_lin - out.momentum_lin);
  out.torque = gains.angular * (measured_ang - out.momentum_ang);
  if (!out.force.allFinite() || !out.torque.allFinite()) {
    throw std::runtime_error("observer estimate became non-finite");
  }

  const double norm =
      std::sqrt(out.force.squaredNorm() + out.torque.squaredNorm());
  const double rate = (norm - out.last_norm) / dt;
  out.growth_time = rate > kDivergenceRate ? out.growth_time + dt : 0.0;
  if (out.growth_time >= kDivergenceWindow) out.diverged = true;
  out.last_norm = norm;
  return out;
}

Vec6 compensate_wrench(const Vec6& virtual_model, const Vec6& gravity_comp,
                       const Vec6& external_estimate) {
  return virtual_model + gravity_comp - external_estimate;
}

Vec2 zmp_shift(const Vec6& external_wrench, double mass, double height,
               double gravity) {
  if (!(mass > 0) || !std::isfinite(height)) {
    throw std::invalid_argument("zmp shift needs a positive mass and finite height");
  }
  const double denom = external_wrench(2) - mass * gravity;
  if (std::abs(denom) < 1.0) {
    throw std::domain_error("net vertical force too small for a ZMP shift");
  }
  return Vec2(
      (external_wrench(0) * height + external_wrench(4)) / denom,
      (external_wrench(1) * height - external_wrench(3)) / denom);
}

}  // namespace crawl
