#pragma once

#include <array>
#include <utility>

#include "crawl/geometry.hpp"

namespace crawl {

/// Estimated terrain plane. `normal` is unit, z-up; roll/pitch are the
/// terrain-frame angles (ZYX, yaw-free); fit_error is the vertical
/// least-squares residual of the fit that produced it.
struct TerrainPlane {
  Vec3 normal = Vec3::UnitZ();
  double roll = 0;
  double pitch = 0;
  double fit_error = 0;
  double timestamp = 0;  // sim time of the touchdown that produced the estimate
};

/// Four stance feet, counter-clockwise when projected on world XY.
/// Constructors verify the ordering via the signed area.
struct FootSet {
  std::array<Vec3, 4> feet;

  double signed_area_xy() const;
  void validate() const;  // throws std::invalid_argument on CW/degenerate sets
};

/// Least-squares plane fit minimizing vertical offsets: rows [x y 1] against
/// -z through the pseudoinverse. Throws on collinear-XY foot sets.
TerrainPlane vertical_fit(const FootSet& feet);

/// Total least-squares (affine) fit: smallest-eigenvalue eigenvector of the
/// mean-centered second-moment matrix. Throws when the feet are collinear
/// (plane direction ambiguous). fit_error is reported as the vertical
/// residual of the recovered plane for comparability with vertical_fit.
TerrainPlane affine_fit(const FootSet& feet);

/// Angular down-weighting W(x) = 1 / (1 + s (x - 1)^p) for x = cos(alpha).
double angular_weight(double cos_alpha, double sensitivity, double p);

struct SmartCorrectionParams {
  double error_threshold = 0.002;  // e_LS below this keeps the plain fit
  double sensitivity_scale = 1e8;  // s = scale * e_LS
  double power = 2.0;              // p in W(x)
};

/// Outlier-robust correction: when the vertical fit's residual exceeds the
/// threshold, blend the previous normal with the four adjacent-edge cross
/// normals, each down-weighted by its angular distance from the previous
/// normal, via the geodesic average. Throws on degenerate (parallel) edges.
TerrainPlane smart_correct(const FootSet& feet, const TerrainPlane& previous,
                           const SmartCorrectionParams& params);

/// (roll, pitch) of a unit z-up normal; throws when normal.z() <= 0 or the
/// input is not unit norm (1e-6).
std::pair<double, double> terrain_angles(const Vec3& unit_normal);

/// Reconstruct the unit normal from terrain angles.
Vec3 normal_from_angles(double roll, double pitch);

/// Right-handed terrain frame: Z is the plane normal, X the projection of the
/// base X axis onto the plane. Throws when the base X axis is within 1e-9 of
/// the normal direction.
Mat3 build_terrain_frame(const Vec3& unit_normal, const Mat3& world_from_base);

}  // namespace crawl
