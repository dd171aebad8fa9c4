#include "crawl/terrain_estimator.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "crawl/geodesic.hpp"

namespace crawl {

namespace {

TerrainPlane plane_from_normal(const Vec3& normal, double fit_error) {
  TerrainPlane plane;
  plane.normal = normal;
  const auto [roll, pitch] = terrain_angles(normal);
  plane.roll = roll;
  plane.pitch = pitch;
  plane.fit_error = fit_error;
  return plane;
}

/// Vertical (z) residual norm of the plane with the given normal through the
/// centroid of the feet.
double vertical_residual(const FootSet& feet, const Vec3& normal) {
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& f : feet.feet) centroid += 0.25 * f;
  double sq = 0.0;
  for (const Vec3& f : feet.feet) {
    const double dz = normal.dot(f - centroid) / normal.z();
    sq += dz * dz;
  }
  return std::sqrt(sq);
}

}  // namespace

double FootSet::signed_area_xy() const {
  double twice = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec3& a = feet[i];
    const Vec3& b = feet[(i + 1) % 4];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

void FootSet::validate() const {
  for (const Vec3& f : feet) {
    if (!f.allFinite()) throw std::invalid_argument("foot position must be finite");
  }
  if (signed_area_xy() <= 1e-6) {
    throw std::invalid_argument(
        "stance feet must be counter-clockwise with positive XY area");
  }
}

TerrainPlane vertical_fit(const FootSet& feet) {
  feet.validate();
  Eigen::Matrix<double, 4, 3> A;
  Eigen::Matrix<double, 4, 1> b;
  for (int i = 0; i < 4; ++i) {
    A.row(i) << feet.feet[i].x(), feet.feet[i].y(), 1.0;
    b(i) = -feet.feet[i].z();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(
      A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sing = svd.singularValues();
  if (sing(2) < 1e-9 * sing(0)) {
    throw std::invalid_argument("vertical fit: feet are collinear in XY");
  }
  const Vec3 coeffs = svd.solve(b);  // z = -(c0 x + c1 y + c2)
  const Vec3 normal = Vec3(coeffs(0), coeffs(1), 1.0).normalized();
  return plane_from_normal(normal, (A * coeffs - b).norm());
}

TerrainPlane affine_fit(const FootSet& feet) {
  feet.validate();
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& f : feet.feet) centroid += 0.25 * f;
  Mat3 moment = Mat3::Zero();
  for (const Vec3& f : feet.feet) {
    const Vec3 r = f - centroid;
    moment += r * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eigen(moment);
  const Vec3 lambda = eigen.eigenvalues();  // ascending
  if (lambda(1) < 1e-12 * std::max(lambda(2), 1e-300)) {
    throw std::invalid_argument("affine fit: feet are collinear");
  }
  Vec3 normal = eigen.eigenvectors().col(0);
  if (std::abs(normal.z()) < 1e-9) {
    throw std::invalid_argument("affine fit produced a vertical plane");
  }
  if (normal.z() < 0.0) normal = -normal;
  return plane_from_normal(normal, vertical_residual(feet, normal));
}

double angular_weight(double cos_alpha, double sensitivity, double p) {
  // |x - 1|^p keeps the weight real for odd p; identical for even p since
  // cos(alpha) <= 1.
  return 1.0 / (1.0 + sensitivity * std::pow(std::abs(cos_alpha - 1.0), p));
}

TerrainPlane smart_correct(const FootSet& feet, const TerrainPlane& previous,
                           const SmartCorrectionParams& params) {
  TerrainPlane fit = vertical_fit(feet);
  if (fit.fit_error <= params.error_threshold) return fit;

  const double prev_norm = previous.normal.norm();
  if (std::abs(prev_norm - 1.0) > 1e-6) {
    throw std::invalid_argument("previous normal must be unit length");
  }

  std::array<Vec3, 4> edges;
  for (int i = 0; i < 4; ++i) {
    edges[i] = feet.feet[(i + 1) % 4] - feet.feet[i];
  }
  const double sensitivity = params.sensitivity_scale * fit.fit_error;
  std::array<Vec3, 5> directions;
  std::array<double, 5> weights;
  directions[0] = previous.normal / prev_norm;
  weights[0] = 1.0;
  for (int i = 0; i < 4; ++i) {
    Vec3 cross = edges[i].cross(edges[(i + 1) % 4]);
    const double len = cross.norm();
    if (len < 1e-9 * edges[i].norm() * edges[(i + 1) % 4].norm()) {
      throw std::invalid_argument("smart correction: adjacent edges are parallel");
    }
    cross /= len;
    if (cross.z() < 0.0) cross = -cross;
    const double cos_alpha = directions[0].dot(cross);
    if (cos_alpha < 0.0) {
      throw std::domain_error(
          "smart correction: edge normal more than 90 deg from the previous plane");
    }
    directions[i + 1] = cross;
    weights[i + 1] = angular_weight(cos_alpha, sensitivity, params.power);
  }
  const Vec3 averaged = geodesic_average(directions, weights);
  return plane_from_normal(averaged, fit.fit_error);
}

std::pair<double, double> terrain_angles(const Vec3& unit_normal) {
  if (std::abs(unit_normal.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("terrain normal must be unit length");
  }
  if (unit_normal.z() <= 0.0) {
    throw std::domain_error("terrain normal must point upward");
  }
  const double pitch = std::atan2(unit_normal.x(), unit_normal.z());
  const double roll =
      std::atan2(-unit_normal.y(), std::hypot(unit_normal.x(), unit_normal.z()));
  return {roll, pitch};
}

Vec3 normal_from_angles(double roll, double pitch) {
  return Vec3(std::sin(pitch) * std::cos(roll), -std::sin(roll),
              std::cos(pitch) * std::cos(roll));
}

Mat3 build_terrain_frame(const Vec3& unit_normal, const Mat3& world_from_base) {
  if (std::abs(unit_normal.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("terrain normal must be unit length");
  }
  const Vec3 base_x = world_from_base.col(0);
  Vec3 x = base_x - base_x.dot(unit_normal) * unit_normal;
  const double len = x.norm();
  if (len < 1e-9) {
    throw std::invalid_argument("base X axis is parallel to the terrain normal");
  }
  x /= len;
  Mat3 frame;
  frame.col(0) = x;
  frame.col(1) = unit_normal.cross(x);
  frame.col(2) = unit_normal;
  return frame;
}

}  // namespace crawl
