#pragma once

#include <Eigen/Dense>

#include "crawl/rng.hpp"

namespace crawl::testing {

inline Vec3 random_unit(Rng& rng) {
  // uniform on the sphere via normal deviates
  Vec3 v{rng.normal(), rng.normal(), rng.normal()};
  while (v.norm() < 1e-6) v = Vec3{rng.normal(), rng.normal(), rng.normal()};
  return v.normalized();
}

/// Unit vector within `max_angle` of `center`.
inline Vec3 random_unit_near(Rng& rng, const Vec3& center, double max_angle) {
  const Vec3 c = center.normalized();
  Vec3 ortho = c.cross(Vec3::UnitX());
  if (ortho.norm() < 1e-6) ortho = c.cross(Vec3::UnitY());
  ortho.normalize();
  const Vec3 ortho2 = c.cross(ortho);
  const double angle = rng.uniform(0.0, max_angle);
  const double azimuth = rng.uniform(0.0, 2.0 * M_PI);
  return (std::cos(angle) * c +
          std::sin(angle) * (std::cos(azimuth) * ortho + std::sin(azimuth) * ortho2))
      .normalized();
}

}  // namespace crawl::testing
