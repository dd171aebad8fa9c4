#include "crawl/geometry.hpp"

#include <Eigen/Geometry>

#include "crawl/rng.hpp"
#include "doctest.h"
#include "support/test_rng.hpp"

using namespace crawl;

TEST_CASE("geometry: rpy round trip") {
  Rng rng(201);
  for (int it = 0; it < 1000; ++it) {
    Vec3 rpy{rng.uniform(-M_PI, M_PI), rng.uniform(-1.4, 1.4), rng.uniform(-M_PI, M_PI)};
    const Mat3 r = rpy_to_rotation(rpy);
    CHECK(is_orthonormal(r));
    const Vec3 back = rotation_to_rpy(r);
    CHECK((back - rpy).norm() < 1e-9);
  }
}

TEST_CASE("geometry: rodrigues matches Eigen AngleAxis") {
  Rng rng(202);
  for (int it = 0; it < 500; ++it) {
    const Vec3 axis = testing::random_unit(rng);
    const double angle = rng.uniform(-M_PI, M_PI);
    const Mat3 ours = rodrigues(axis, angle);
    const Mat3 eigen = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    CHECK((ours - eigen).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("geometry: euler rates map to angular velocity (finite differences)") {
  Rng rng(203);
  const double h = 1e-7;
  for (int it = 0; it < 200; ++it) {
    Vec3 rpy{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    Vec3 rates{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const Mat3 r0 = rpy_to_rotation(rpy);
    const Mat3 r1 = rpy_to_rotation(rpy + h * rates);
    const Mat3 skew = (r1 - r0) * r0.transpose() / h;
    const Vec3 omega_fd{skew(2, 1), skew(0, 2), skew(1, 0)};
    const Vec3 omega = euler_rates_to_omega(rpy, rates);
    CHECK((omega - omega_fd).norm() < 1e-5);
  }
}

TEST_CASE("geometry: angle wrapping") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-3.0 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(M_PI + 0.1) == doctest::Approx(-M_PI + 0.1));
  CHECK(nearest_angle(0.1, 2.0 * M_PI) == doctest::Approx(2.0 * M_PI + 0.1));
  CHECK(nearest_angle(-0.1, -2.0 * M_PI) == doctest::Approx(-2.0 * M_PI - 0.1));
}

TEST_CASE("geometry: polygon margin on the unit square") {
  const Vec2 verts[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_margin({0.5, 0.5}, verts, 4) == doctest::Approx(0.5));
  CHECK(polygon_margin({0.25, 0.5}, verts, 4) == doctest::Approx(0.25));
  CHECK(polygon_margin({-0.25, 0.5}, verts, 4) == doctest::Approx(-0.25));
  CHECK(polygon_margin({0.5, 1.2}, verts, 4) == doctest::Approx(-0.2));
}

TEST_CASE("geometry: frame set yaw and horizontal frame") {
  FrameSet frames;
  frames.world_from_base = rpy_to_rotation({0.2, -0.3, 0.7});
  CHECK(frames.yaw() == doctest::Approx(0.7).epsilon(1e-12));
  const Mat3 h = frames.world_from_horizontal();
  CHECK((h - rot_z(0.7)).cwiseAbs().maxCoeff() < 1e-12);
  // horizontal X is the base X projected to the ground plane, re-normalized
  const Vec3 base_x = frames.world_from_base.col(0);
  Vec3 flat{base_x.x(), base_x.y(), 0.0};
  flat.normalize();
  CHECK((h.col(0) - flat).norm() < 1e-12);
}
