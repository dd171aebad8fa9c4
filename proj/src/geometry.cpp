#include "crawl/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace crawl {

Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

Mat3 rot_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Mat3 rpy_to_rotation(const Vec3& rpy) {
  return rot_z(rpy.z()) * rot_y(rpy.y()) * rot_x(rpy.x());
}

Vec3 rotation_to_rpy(const Mat3& r) {
  const double sp = -r(2, 0);
  if (std::abs(sp) > 1.0 - 1e-9) {
    throw std::domain_error("rotation_to_rpy: pitch at gimbal lock");
  }
  Vec3 rpy;
  rpy.y() = std::asin(sp);
  rpy.x() = std::atan2(r(2, 1), r(2, 2));
  rpy.z() = std::atan2(r(1, 0), r(0, 0));
  return rpy;
}

Vec3 euler_rates_to_omega(const Vec3& rpy, const Vec3& rpy_rates) {
  // omega = yaw_dot*e_z + pitch_dot*Rz(yaw)*e_y + roll_dot*Rz(yaw)*Ry(pitch)*e_x
  const Mat3 rz = rot_z(rpy.z());
  return rpy_rates.z() * Vec3::UnitZ() + rpy_rates.y() * (rz * Vec3::UnitY()) +
         rpy_rates.x() * (rz * rot_y(rpy.y()) * Vec3::UnitX());
}

Mat3 rodrigues(const Vec3& unit_axis, double angle) {
  Mat3 k;
  k << 0, -unit_axis.z(), unit_axis.y(),
       unit_axis.z(), 0, -unit_axis.x(),
       -unit_axis.y(), unit_axis.x(), 0;
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

double wrap_angle(double angle) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(angle, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

double nearest_angle(double target, double reference) {
  return reference + wrap_angle(target - reference);
}

bool is_orthonormal(const Mat3& rotation, double tol) {
  return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
         std::abs(rotation.determinant() - 1.0) < tol;
}

double signed_line_distance(const Vec2& point, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double len = e.norm();
  if (len < 1e-12) {
    throw std::invalid_argument("signed_line_distance: degenerate edge");
  }
  return (e.x() * (point.y() - a.y()) - e.y() * (point.x() - a.x())) / len;
}

double polygon_margin(const Vec2& point, const Vec2* vertices, int count) {
  if (count < 3) {
    throw std::invalid_argument("polygon_margin: need at least 3 vertices");
  }
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    margin = std::min(margin,
                      signed_line_distance(point, vertices[i], vertices[(i + 1) % count]));
  }
  return margin;
}

double FrameSet::yaw() const {
  return std::atan2(world_from_base(1, 0), world_from_base(0, 0));
}

Mat3 FrameSet::world_from_horizontal() const { return rot_z(yaw()); }

}  // namespace crawl
