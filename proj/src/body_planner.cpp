#include "crawl/body_planner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crawl {

namespace {

void check_limit(double value, const Vec2& limits, const char* joint) {
  if (value < limits(0) || value > limits(1)) {
    throw std::out_of_range(std::string(joint) + " joint limit exceeded");
  }
}

Vec3 sagittal_fk(const LegModel& leg, const JointAngles& q) {
  const double s1 = std::sin(q.hfe), c1 = std::cos(q.hfe);
  const double s12 = std::sin(q.hfe + q.kfe), c12 = std::cos(q.hfe + q.kfe);
  return Vec3(leg.upper * s1 + leg.lower * s12, 0.0,
              -(leg.upper * c1 + leg.lower * c12));
}

}  // namespace

std::array<LegModel, 4> make_leg_models(double hip_x, double hip_y, double upper,
                                        double lower) {
  if (!(hip_x > 0) || !(hip_y > 0) || !(upper > 0) || !(lower > 0)) {
    throw std::invalid_argument("leg geometry must be positive");
  }
  std::array<LegModel, 4> legs;
  for (LegId id : kAllLegs) {
    LegModel leg;
    leg.hip = Vec3(is_front(id) ? hip_x : -hip_x, is_left(id) ? hip_y : -hip_y, 0.0);
    leg.upper = upper;
    leg.lower = lower;
    leg.knee_sign = is_front(id) ? -1.0 : 1.0;
    legs[static_cast<int>(id)] = leg;
  }
  return legs;
}

double robot_height(std::span<const Vec3> feet_in_base, const Vec3& com_in_base,
                    const Mat3& terrain_from_base) {
  if (feet_in_base.empty()) {
    throw std::invalid_argument("robot height needs at least one stance foot");
  }
  Vec3 mean = Vec3::Zero();
  for (const Vec3& f : feet_in_base) mean += f;
  mean /= static_cast<double>(feet_in_base.size());
  return std::abs((terrain_from_base * (com_in_base - mean)).z());
}

Vec3 com_target(const Vec3& diagonal_a, const Vec3& diagonal_b, const Vec3& third,
                double margin, double height, const Vec3& terrain_normal) {
  const Vec3 n = terrain_normal.normalized();
  const double cos_alpha = n.z();
  if (cos_alpha <= 0.1) {
    throw std::domain_error("terrain too steep for the height scaling");
  }
  const Vec3 mid = 0.5 * (diagonal_a + diagonal_b);
  Vec3 along = diagonal_b - diagonal_a;
  along -= n * n.dot(along);
  const Vec3 toward_raw = third - mid;
  if (along.norm() < 1e-9 || toward_raw.cross(diagonal_b - diagonal_a).norm() < 1e-9) {
    throw std::invalid_argument("degenerate support triangle");
  }
  along.normalize();
  Vec3 inward = toward_raw - n * n.dot(toward_raw);
  inward -= along * along.dot(inward);
  if (inward.norm() < 1e-9) {
    throw std::invalid_argument("degenerate support triangle");
  }
  inward.normalize();
  return mid + margin * inward + (height / cos_alpha) * Vec3::UnitZ();
}

Vec3 orientation_target(const TerrainPlane& plane, const std::array<Vec3, 4>& feet) {
  const Vec2 left = (feet[static_cast<int>(LegId::LF)] -
                     feet[static_cast<int>(LegId::LH)]).head<2>();
  const Vec2 right = (feet[static_cast<int>(LegId::RF)] -
                      feet[static_cast<int>(LegId::RH)]).head<2>();
  if (left.norm() < 1e-9 || right.norm() < 1e-9) {
    throw std::invalid_argument("coincident ipsilateral feet");
  }
  const double yaw_left = std::atan2(left.y(), left.x());
  const double yaw_right = std::atan2(right.y(), right.x());
  const double yaw = std::atan2(std::sin(yaw_left) + std::sin(yaw_right),
                                std::cos(yaw_left) + std::cos(yaw_right));
  return Vec3(plane.roll, plane.pitch, yaw);
}

Vec3 BodyTarget::com_at(double t) const {
  return Vec3(eval_quintic(com[0], t).position, eval_quintic(com[1], t).position,
              eval_quintic(com[2], t).position);
}

Vec3 BodyTarget::com_velocity_at(double t) const {
  return Vec3(eval_quintic(com[0], t).velocity, eval_quintic(com[1], t).velocity,
              eval_quintic(com[2], t).velocity);
}

Vec3 BodyTarget::com_acceleration_at(double t) const {
  return Vec3(eval_quintic(com[0], t).acceleration,
              eval_quintic(com[1], t).acceleration,
              eval_quintic(com[2], t).acceleration);
}

Vec3 BodyTarget::rpy_at(double t) const {
  return Vec3(eval_quintic(rpy[0], t).position, eval_quintic(rpy[1], t).position,
              eval_quintic(rpy[2], t).position);
}

Vec3 BodyTarget::rpy_rates_at(double t) const {
  return Vec3(eval_quintic(rpy[0], t).velocity, eval_quintic(rpy[1], t).velocity,
              eval_quintic(rpy[2], t).velocity);
}

BodyTarget plan_body_motion(const Vec3& com_now, const Vec3& rpy_now,
                            const Vec3& com_target, const Vec3& rpy_target,
                            double duration) {
  if (!(duration > 0)) {
    throw std::invalid_argument("body motion duration must be positive");
  }
  BodyTarget out;
  out.com_target = com_target;
  out.rpy_target = rpy_target;
  out.duration = duration;
  for (int i = 0; i < 3; ++i) {
    BoundaryConditions bc;
    bc.p0 = com_now(i);
    bc.pf = com_target(i);
    out.com[i] = solve_quintic(bc, duration);
    bc.p0 = rpy_now(i);
    bc.pf = i == 2 ? nearest_angle(rpy_target(i), rpy_now(i)) : rpy_target(i);
    out.rpy[i] = solve_quintic(bc, duration);
  }
  return out;
}

Vec3 stance_foot_velocity(const Vec3& com_velocity, const Vec3& omega,
                          const Vec3& foot_world, const Vec3& com_world) {
  return -com_velocity - omega.cross(foot_world - com_world);
}

void StanceFootRef::reset(const Vec3& pos) {
  position = pos;
  last_velocity = Vec3::Zero();
}

void StanceFootRef::advance(const Vec3& velocity, double dt) {
  position += 0.5 * dt * (velocity + last_velocity);
  last_velocity = velocity;
}

JointAngles leg_ik(const LegModel& leg, const Vec3& foot_in_base) {
  const Vec3 r = foot_in_base - leg.hip;
  if (!r.allFinite()) throw std::invalid_argument("foot target must be finite");

  const double haa = std::atan2(r.y(), -r.z());
  const double rho = std::hypot(r.y(), r.z());  // distance in the HAA plane
  const double reach = std::hypot(r.x(), rho);
  const double r_min = std::abs(leg.upper - leg.lower);
  const double r_max = leg.upper + leg.lower;
  if (reach < r_min - 1e-12 || reach > r_max + 1e-12) {
    throw std::domain_error("foot target outside the reachable annulus");
  }

  const double cos_kfe = std::clamp(
      (reach * reach - leg.upper * leg.upper - leg.lower * leg.lower) /
          (2.0 * leg.upper * leg.lower),
      -1.0, 1.0);
  const double kfe = leg.knee_sign * std::acos(cos_kfe);
  const double hfe = std::atan2(r.x(), rho) -
                     std::atan2(leg.lower * std::sin(kfe),
                                leg.upper + leg.lower * std::cos(kfe));

  JointAngles q{haa, hfe, kfe};
  check_limit(q.haa, leg.haa_limits, "HAA");
  check_limit(q.hfe, leg.hfe_limits, "HFE");
  check_limit(q.kfe, leg.kfe_limits, "KFE");
  return q;
}

Vec3 leg_fk(const LegModel& leg, const JointAngles& q) {
  return leg.hip + rot_x(q.haa) * sagittal_fk(leg, q);
}

Mat3 leg_jacobian(const LegModel& leg, const JointAngles& q) {
  const Mat3 roll = rot_x(q.haa);
  const double c1 = std::cos(q.hfe), s1 = std::sin(q.hfe);
  const double c12 = std::cos(q.hfe + q.kfe), s12 = std::sin(q.hfe + q.kfe);
  Mat3 j;
  j.col(0) = Vec3::UnitX().cross(roll * sagittal_fk(leg, q));
  j.col(1) = roll * Vec3(leg.upper * c1 + leg.lower * c12, 0.0,
                         leg.upper * s1 + leg.lower * s12);
  j.col(2) = roll * Vec3(leg.lower * c12, 0.0, leg.lower * s12);
  return j;
}

Vec3 joint_velocity_refs(const LegModel& leg, const JointAngles& q,
                         const Vec3& foot_velocity) {
  const Mat3 j = leg_jacobian(leg, q);
  if (std::abs(j.determinant()) < 1e-6) {
    throw std::domain_error("leg Jacobian near singular (stretched leg)");
  }
  return j.partialPivLu().solve(foot_velocity);
}

}  // namespace crawl
