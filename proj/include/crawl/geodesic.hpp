#pragma once

#include <span>

#include "crawl/geometry.hpp"

namespace crawl {

/// Weighted average of unit direction vectors on the sphere (incremental
/// geodesic scheme): fold each direction into the running mean by rotating
/// along the great circle by the weight-proportional fraction of the angle.
///
/// Inputs must be unit-norm (1e-6 tolerance) with positive weights; throws
/// std::invalid_argument otherwise, and std::domain_error when a direction is
/// antipodal to the running mean (undefined geodesic).
Vec3 geodesic_average(std::span<const Vec3> directions,
                      std::span<const double> weights);

}  // namespace crawl
