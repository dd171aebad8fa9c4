#pragma once

#include <Eigen/Dense>

namespace crawl {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

constexpr double kGravity = 9.81;

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// ZYX convention: R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rpy_to_rotation(const Vec3& rpy);

/// Inverse of rpy_to_rotation; pitch in [-pi/2, pi/2]. Throws on gimbal lock
/// (|pitch| within 1e-9 of pi/2).
Vec3 rotation_to_rpy(const Mat3& rotation);

/// World angular velocity from ZYX euler angles and their rates.
Vec3 euler_rates_to_omega(const Vec3& rpy, const Vec3& rpy_rates);

/// Rotation of `angle` about a unit axis.
Mat3 rodrigues(const Vec3& unit_axis, double angle);

/// Normalize an angle to (-pi, pi].
double wrap_angle(double angle);

/// Unwrap `target` to the representative nearest `reference`.
double nearest_angle(double target, double reference);

bool is_orthonormal(const Mat3& rotation, double tol = 1e-9);

/// Signed distance from a point to the segment-supported line (a, b) in 2D,
/// positive on the left of a->b.
double signed_line_distance(const Vec2& point, const Vec2& a, const Vec2& b);

/// Signed distance of a point to a convex CCW polygon boundary: positive
/// inside (distance to the nearest edge line), negative outside.
double polygon_margin(const Vec2& point, const Vec2* vertices, int count);

/// Reference frames the planner works in. The base pose is primary; the
/// horizontal frame shares the base yaw with zero roll/pitch; terrain and
/// per-leg swing frames are refreshed by the estimator/planner.
struct FrameSet {
  Mat3 world_from_base = Mat3::Identity();
  Vec3 base_position = Vec3::Zero();
  Mat3 world_from_terrain = Mat3::Identity();
  std::array<Mat3, 4> world_from_swing = {Mat3::Identity(), Mat3::Identity(),
                                          Mat3::Identity(), Mat3::Identity()};

  double yaw() const;
  Mat3 world_from_horizontal() const;  // Rz(yaw)
};

}  // namespace crawl
