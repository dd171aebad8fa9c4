#pragma once

#include <array>
#include <span>

#include "crawl/geometry.hpp"
#include "crawl/step_planner.hpp"
#include "crawl/terrain_estimator.hpp"

namespace crawl {

/// Kinematic model of one leg: HAA rotates about base X at the hip, HFE/KFE
/// about the leg Y axis. knee_sign picks the elbow: -1 knee ahead of the
/// hip-foot line (front legs), +1 knee behind (hind legs).
struct LegModel {
  Vec3 hip = Vec3::Zero();  // base frame
  double upper = 0.35;
  double lower = 0.346;
  double knee_sign = -1.0;
  Vec2 haa_limits{-0.7, 0.7};
  Vec2 hfe_limits{-1.6, 1.6};
  Vec2 kfe_limits{-2.46, 2.46};
};

struct JointAngles {
  double haa = 0, hfe = 0, kfe = 0;
};

/// Default four-leg model from hip half-spacings and link lengths.
std::array<LegModel, 4> make_leg_models(double hip_x, double hip_y, double upper,
                                        double lower);

/// Distance of the CoM from the terrain plane, averaging the stance feet
/// (positions in the base frame; terrain_from_base maps base to terrain
/// coordinates). Positive above the plane.
double robot_height(std::span<const Vec3> feet_in_base, const Vec3& com_in_base,
                    const Mat3& terrain_from_base);

/// CoM position target over a future support triangle: planar point at
/// distance `margin` from the diagonal-foot midpoint, perpendicular to the
/// diagonal toward the third foot (in the terrain plane through the triangle
/// centroid), lifted along gravity to plane-distance `height`.
Vec3 com_target(const Vec3& diagonal_a, const Vec3& diagonal_b, const Vec3& third,
                double margin, double height, const Vec3& terrain_normal);

/// Trunk orientation target: roll/pitch from the terrain plane, yaw the
/// circular mean of the left and right hind->front foot lines (world frame,
/// feet indexed by LegId).
Vec3 orientation_target(const TerrainPlane& plane, const std::array<Vec3, 4>& feet);

/// Body-motion-phase plan: CoM position and ZYX Euler angles as quintics from
/// the actual state to the targets, zero velocity and acceleration at both
/// ends. Yaw is steered through the nearest equivalent angle.
struct BodyTarget {
  Vec3 com_target = Vec3::Zero();
  Vec3 rpy_target = Vec3::Zero();
  double duration = 0;
  std::array<QuinticSegment, 3> com;  // world x, y, z
  std::array<QuinticSegment, 3> rpy;  // roll, pitch, yaw

  Vec3 com_at(double t) const;
  Vec3 com_velocity_at(double t) const;
  Vec3 com_acceleration_at(double t) const;
  Vec3 rpy_at(double t) const;
  Vec3 rpy_rates_at(double t) const;
};

BodyTarget plan_body_motion(const Vec3& com_now, const Vec3& rpy_now,
                            const Vec3& com_target, const Vec3& rpy_target,
                            double duration);

/// Stance-foot velocity that keeps the foot world-fixed while the trunk
/// tracks com_velocity/omega: -v - omega x (foot - com).
Vec3 stance_foot_velocity(const Vec3& com_velocity, const Vec3& omega,
                          const Vec3& foot_world, const Vec3& com_world);

/// Trapezoidal integrator for a stance-foot reference position.
struct StanceFootRef {
  Vec3 position = Vec3::Zero();
  Vec3 last_velocity = Vec3::Zero();
  void reset(const Vec3& pos);
  void advance(const Vec3& velocity, double dt);
};

/// Analytic leg IK for a foot expressed in the base frame. Throws
/// std::domain_error when out of the reach annulus and std::out_of_range when
/// a joint limit is exceeded.
JointAngles leg_ik(const LegModel& leg, const Vec3& foot_in_base);
Vec3 leg_fk(const LegModel& leg, const JointAngles& q);
Mat3 leg_jacobian(const LegModel& leg, const JointAngles& q);

/// J^-1 * foot velocity; throws std::domain_error when |det J| < 1e-6
/// (stretched/singular leg).
Vec3 joint_velocity_refs(const LegModel& leg, const JointAngles& q,
                         const Vec3& foot_velocity);

}  // namespace crawl
