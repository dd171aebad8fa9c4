#pragma once

#include <vector>

#include "crawl/geometry.hpp"

namespace crawl {

enum class ObserverForm { plain, spatial };

struct ObserverGains {
  Mat3 linear = Mat3::Identity() * 10.0;
  Mat3 angular = Mat3::Identity();
};

struct ContactForce {
  Vec3 position = Vec3::Zero();  // world
  Vec3 force = Vec3::Zero();     // world
};

/// Centroidal measurements consumed by one observer step.
struct CentroidalState {
  double mass = 0;
  Vec3 gravity{0, 0, -kGravity};
  Mat3 inertia = Mat3::Identity();  // about the CoM, world axes
  Vec3 com_position = Vec3::Zero();
  Vec3 com_velocity = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  std::vector<ContactForce> contacts;
};

/// Momentum-based disturbance observer state. `force`/`torque` are the
/// external wrench estimate at the CoM.
struct ObserverState {
  Vec3 momentum_lin = Vec3::Zero();  // predicted linear momentum
  Vec3 momentum_ang = Vec3::Zero();  // predicted angular momentum
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  bool initialized = false;
  // divergence guardrail bookkeeping
  double last_norm = 0;
  double growth_time = 0;
  bool diverged = false;
};

/// Explicit-Euler observer update: integrate the momentum prediction with the
/// current estimate folded in, then correct the estimate from the
/// measured-minus-predicted momentum. The spatial form subtracts the gyroscopic
/// bias v x* I v from the prediction integrand.
ObserverState observer_step(const ObserverState& state, const CentroidalState& inputs,
                            const ObserverGains& gains, ObserverForm form, double dt);

/// Desired total wrench with disturbance compensation (Eq. W_d = W_vm + W_g - W_ext).
Vec6 compensate_wrench(const Vec6& virtual_model, const Vec6& gravity_comp,
                       const Vec6& external_estimate);

/// Stationary CoM offset that re-centers the ZMP under an external wrench
/// (force + torque about the CoM), for a CoM `height` above the ZMP plane.
/// Throws std::domain_error when the net vertical force (f_z - m g) vanishes.
Vec2 zmp_shift(const Vec6& external_wrench, double mass, double height,
               double gravity = kGravity);

}  // namespace crawl
