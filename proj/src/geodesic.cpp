#include "crawl/geodesic.hpp"

#include <cmath>
#include <stdexcept>

namespace crawl {

Vec3 geodesic_average(std::span<const Vec3> directions,
                      std::span<const double> weights) {
  if (directions.empty() || directions.size() != weights.size()) {
    throw std::invalid_argument("geodesic_average: need matching non-empty inputs");
  }
  for (size_t i = 0; i < directions.size(); ++i) {
    if (std::abs(directions[i].norm() - 1.0) > 1e-6) {
      throw std::invalid_argument("geodesic_average: directions must be unit norm");
    }
    if (!(weights[i] > 0.0)) {
      throw std::invalid_argument("geodesic_average: weights must be positive");
    }
  }

  Vec3 mean = directions[0];
  double weight_sum = weights[0];
  for (size_t k = 1; k < directions.size(); ++k) {
    const Vec3& n = directions[k];
    const double cos_angle = std::clamp(mean.dot(n), -1.0, 1.0);
    const double angle = std::acos(cos_angle);
    if (angle > M_PI - 1e-9) {
      throw std::domain_error("geodesic_average: antipodal direction");
    }
    weight_sum += weights[k];
    if (angle < 1e-12) {
      continue;  // already aligned; mean unchanged
    }
    Vec3 axis = n.cross(mean);
    const double axis_norm = axis.norm();
    if (axis_norm < 1e-12) {
      continue;
    }
    axis /= axis_norm;
    // Rotate the new sample toward the running mean, stopping at the
    // weight-balanced point of the geodesic.
    const double partial = angle * (weight_sum - weights[k]) / weight_sum;
    mean = rodrigues(axis, partial) * n;
    mean.normalize();
  }

  // The incremental fold is order-dependent at second order in the spread;
  // polish it to the (unique, order-free) weighted Karcher mean.
  for (int iter = 0; iter < 64; ++iter) {
    Vec3 step = Vec3::Zero();
    for (size_t k = 0; k < directions.size(); ++k) {
      const Vec3& n = directions[k];
      const double cos_angle = std::clamp(mean.dot(n), -1.0, 1.0);
      const double angle = std::acos(cos_angle);
      if (angle < 1e-15) continue;
      if (angle > M_PI - 1e-9) {
        throw std::domain_error("geodesic_average: antipodal direction");
      }
      const Vec3 tangent = (n - cos_angle * mean) / std::sin(angle);
      step += weights[k] * angle * tangent;
    }
    step /= weight_sum;
    const double len = step.norm();
    if (len < 1e-14) break;
    mean = std::cos(len) * mean + std::sin(len) * (step / len);
    mean.normalize();
  }
  return mean;
}

}  // namespace crawl
