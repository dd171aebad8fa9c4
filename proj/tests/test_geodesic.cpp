#include "crawl/geodesic.hpp"

#include <algorithm>
#include <vector>

#include "crawl/rng.hpp"
#include "doctest.h"
#include "support/test_rng.hpp"

using namespace crawl;

namespace {
double angle_between(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}
}  // namespace

TEST_CASE("geodesic: single direction returns itself") {
  const Vec3 n = Vec3{0.3, -0.4, 0.866}.normalized();
  const Vec3 out = geodesic_average(std::array{n}, std::array{1.0});
  CHECK((out - n).norm() < 1e-12);
}

TEST_CASE("geodesic: equal weights of two directions give the great-circle midpoint") {
  const Vec3 a = Vec3::UnitX();
  const Vec3 b = Vec3::UnitZ();
  const Vec3 out = geodesic_average(std::array{a, b}, std::array{1.0, 1.0});
  CHECK((out - (a + b).normalized()).norm() < 1e-12);
}

TEST_CASE("geodesic: weighted pair splits the arc by weight ratio") {
  // e_x with weight 2 and e_y with weight 1 -> 30 deg from e_x
  const Vec3 out =
      geodesic_average(std::array{Vec3{Vec3::UnitX()}, Vec3{Vec3::UnitY()}}, std::array{2.0, 1.0});
  CHECK(out.x() == doctest::Approx(std::cos(M_PI / 6.0)).epsilon(1e-12));
  CHECK(out.y() == doctest::Approx(std::sin(M_PI / 6.0)).epsilon(1e-12));
  CHECK(std::abs(out.z()) < 1e-12);
}

TEST_CASE("geodesic: output stays unit and inside the input cone") {
  Rng rng(301);
  for (int it = 0; it < 1000; ++it) {
    const Vec3 center = testing::random_unit(rng);
    const int n = rng.uniform_int(2, 6);
    std::vector<Vec3> dirs;
    std::vector<double> weights;
    double max_spread = 0.0;
    Vec3 chord = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
      dirs.push_back(testing::random_unit_near(rng, center, 0.4));
      weights.push_back(rng.uniform(0.1, 5.0));
      chord += dirs.back();
    }
    chord.normalize();
    for (const Vec3& d : dirs) max_spread = std::max(max_spread, angle_between(d, chord));
    const Vec3 out = geodesic_average(dirs, weights);
    CHECK(std::abs(out.norm() - 1.0) < 1e-9);
    CHECK(angle_between(out, chord) <= max_spread + 1e-9);
  }
}

TEST_CASE("geodesic: dominant weight pins the average") {
  Rng rng(302);
  for (int it = 0; it < 100; ++it) {
    const Vec3 anchor = testing::random_unit(rng);
    std::vector<Vec3> dirs{anchor};
    std::vector<double> weights{1e9};
    for (int i = 0; i < 3; ++i) {
      dirs.push_back(testing::random_unit_near(rng, anchor, 0.5));
      weights.push_back(1.0);
    }
    const Vec3 out = geodesic_average(dirs, weights);
    CHECK(angle_between(out, anchor) < 1e-4);
  }
}

TEST_CASE("geodesic: permutations of a tight cluster agree") {
  Rng rng(303);
  for (int it = 0; it < 200; ++it) {
    const Vec3 center = testing::random_unit(rng);
    std::vector<Vec3> dirs;
    for (int i = 0; i < 4; ++i) {
      dirs.push_back(testing::random_unit_near(rng, center, 5.0 * M_PI / 180.0));
    }
    const std::vector<double> weights(4, 1.0);
    const Vec3 ref = geodesic_average(dirs, weights);
    std::vector<Vec3> shuffled = dirs;
    std::reverse(shuffled.begin(), shuffled.end());
    const Vec3 alt = geodesic_average(shuffled, weights);
    CHECK(angle_between(ref, alt) < 1e-6);
  }
}

TEST_CASE("geodesic: invalid inputs are rejected") {
  CHECK_THROWS_AS(geodesic_average({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      geodesic_average(std::array{Vec3{2.0, 0.0, 0.0}}, std::array{1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      geodesic_average(std::array{Vec3{Vec3::UnitX()}, Vec3{Vec3::UnitY()}}, std::array{1.0, 0.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      geodesic_average(std::array{Vec3{Vec3::UnitX()}, Vec3{Vec3::UnitY()}}, std::array{1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(geodesic_average(std::array{Vec3{Vec3::UnitX()}, Vec3{-1.0, 0.0, 0.0}},
                                   std::array{1.0, 1.0}),
                  std::domain_error);
}
