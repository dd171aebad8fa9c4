#include "crawl/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crawl/rng.hpp"
#include "doctest.h"

using namespace crawl;

namespace {

/// Random config that stays inside every validation range.
ScenarioConfig random_config(Rng& rng) {
  ScenarioConfig c;
  c.robot.mass = rng.uniform(20.0, 200.0);
  c.robot.inertia_diag = Vec3(rng.uniform(1.0, 10.0), rng.uniform(1.0, 10.0),
                              rng.uniform(1.0, 10.0));
  c.robot.com_offset = Vec3(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                            rng.uniform(-0.05, 0.05));
  c.robot.hip_x = rng.uniform(0.3, 0.45);
  c.robot.hip_y = rng.uniform(0.15, 0.3);
  c.robot.upper_leg = rng.uniform(0.3, 0.4);
  c.robot.lower_leg = rng.uniform(0.3, 0.4);
  c.robot.height = rng.uniform(0.45, 0.9 * (c.robot.upper_leg + c.robot.lower_leg));
  c.robot.min_height = rng.uniform(0.2, c.robot.height);
  c.gait.step_height = rng.uniform(0.03, 0.12);
  c.gait.apex_ratio = rng.uniform(0.2, 0.8);
  c.gait.com_margin = rng.uniform(0.02, 0.08);
  c.gait.duty_factor = rng.uniform(0.5, 0.9);
  c.gait.touchdown_ticks = rng.uniform_int(1, 5);
  c.gait.clearance_samples = rng.uniform_int(5, 40);
  switch (rng.uniform_int(0, 3)) {
    case 0: c.terrain.type = TerrainType::flat; break;
    case 1: c.terrain.type = TerrainType::ramp; break;
    case 2: c.terrain.type = TerrainType::stairs; break;
    default: c.terrain.type = TerrainType::rocks; break;
  }
  c.terrain.resolution = rng.uniform(0.02, 0.08);
  c.terrain.origin = Vec2(rng.uniform(-2.0, 0.0), rng.uniform(-2.0, 0.0));
  c.terrain.extent = Vec2(rng.uniform(2.0, 8.0), rng.uniform(2.0, 5.0));
  c.terrain.angle_deg = rng.uniform(-45.0, 45.0);
  c.terrain.rise = rng.uniform(0.05, 0.2);
  c.terrain.tread = rng.uniform(0.3, 0.6);
  c.terrain.count = rng.uniform_int(1, 8);
  c.terrain.turn = rng.uniform_int(-1, 1);
  c.terrain.max_height = rng.uniform(0.02, 0.15);
  c.terrain.start_x = rng.uniform(0.2, 1.5);
  c.observer.enabled = rng.uniform01() < 0.5;
  c.observer.form = rng.uniform01() < 0.5 ? ObserverForm::plain : ObserverForm::spatial;
  c.observer.gain_lin = rng.uniform(5.0, 200.0);
  c.observer.gain_ang = rng.uniform(0.5, 20.0);
  c.observer.compensation = rng.uniform01() < 0.5;
  c.observer.zmp_correction = rng.uniform01() < 0.5;
  c.observer.noise_sigma = rng.uniform(0.0, 30.0);
  c.features.vision_stepping = rng.uniform01() < 0.5;
  c.features.clearance_opt = rng.uniform01() < 0.5;
  c.features.step_reflex = rng.uniform01() < 0.5;
  c.features.height_reflex = rng.uniform01() < 0.5;
  c.features.stair_mode = rng.uniform01() < 0.5;
  c.features.smart_terrain = rng.uniform01() < 0.5;
  const int profile_rows = rng.uniform_int(0, 4);
  double t = 0.0;
  for (int i = 0; i < profile_rows; ++i) {
    ProfileRow row;
    row.t = t;
    row.velocity = Vec2(rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2));
    row.yaw_rate = rng.uniform(-0.4, 0.4);
    c.profile.push_back(row);
    t += rng.uniform(0.5, 3.0);
  }
  const int wrench_rows = rng.uniform_int(0, 3);
  for (int i = 0; i < wrench_rows; ++i) {
    WrenchRow row;
    row.t_start = rng.uniform(0.0, 5.0);
    row.t_end = row.t_start + rng.uniform(0.1, 4.0);
    row.force = Vec3(rng.normal(0, 40), rng.normal(0, 40), rng.normal(0, 40));
    row.torque = Vec3(rng.normal(0, 5), rng.normal(0, 5), rng.normal(0, 5));
    row.application = Vec3(rng.uniform(-0.6, 0.6), rng.uniform(-0.3, 0.3),
                           rng.uniform(-0.1, 0.3));
    c.wrenches.push_back(row);
  }
  c.sim.dt = rng.uniform(0.002, 0.004);
  c.sim.duration = rng.uniform(1.0, 30.0);
  c.sim.seed = static_cast<uint64_t>(rng.uniform_int(0, 1 << 30));
  return c;
}

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& err) {
    return err.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal config text fills documented defaults") {
  const ScenarioConfig parsed = parse_config("[sim]\nduration = 5\n");
  ScenarioConfig expect;
  expect.sim.duration = 5.0;
  CHECK(parsed == expect);
  CHECK(parsed.robot.mass == 85.0);
  CHECK(parsed.robot.height == 0.55);
  CHECK(parsed.gait.duty_factor == 0.75);
  CHECK(parsed.gait.com_margin == 0.05);
  CHECK(parsed.terrain.type == TerrainType::flat);
  CHECK(parsed.observer.enabled);
  CHECK(parsed.observer.form == ObserverForm::plain);
  CHECK(parsed.observer.gain_lin == 10.0);
  CHECK(parsed.observer.gain_ang == 1.0);
  CHECK(parsed.features.step_reflex);
  CHECK_FALSE(parsed.features.stair_mode);
  CHECK(parsed.profile.empty());
  CHECK(parsed.wrenches.empty());
  CHECK(parsed.sim.dt == 0.004);
  CHECK(parsed.sim.seed == 1);
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
  const std::string text =
      "# top comment\n"
      "\n"
      "[robot]\r\n"
      "  mass   =  90.5  \n"
      "; another comment style\n"
      "[sim]\n"
      "seed=42\n";
  const ScenarioConfig c = parse_config(text);
  CHECK(c.robot.mass == 90.5);
  CHECK(c.sim.seed == 42);
}

TEST_CASE("profile and wrench rows parse by position") {
  const std::string text =
      "[profile]\n"
      "0 0.1 0 0\n"
      "4.5 0.2 -0.05 0.1\n"
      "[wrench]\n"
      "2 3.5 -75 0 0 0 0 0 -0.6 0 0.08\n";
  const ScenarioConfig c = parse_config(text);
  REQUIRE(c.profile.size() == 2);
  CHECK(c.profile[0].t == 0.0);
  CHECK(c.profile[0].velocity == Vec2(0.1, 0.0));
  CHECK(c.profile[1].t == 4.5);
  CHECK(c.profile[1].velocity == Vec2(0.2, -0.05));
  CHECK(c.profile[1].yaw_rate == 0.1);
  REQUIRE(c.wrenches.size() == 1);
  CHECK(c.wrenches[0].t_start == 2.0);
  CHECK(c.wrenches[0].t_end == 3.5);
  CHECK(c.wrenches[0].force == Vec3(-75, 0, 0));
  CHECK(c.wrenches[0].torque == Vec3::Zero());
  CHECK(c.wrenches[0].application == Vec3(-0.6, 0, 0.08));
}

TEST_CASE("syntax errors carry the offending line number") {
  CHECK(error_line("[robot]\nmass = 85\n[nope]\n") == 3);
  CHECK(error_line("[robot]\nwingspan = 2\n") == 2);
  CHECK(error_line("[robot]\nmass = heavy\n") == 2);
  CHECK(error_line("[robot]\nmass 85\n") == 2);
  CHECK(error_line("mass = 85\n") == 1);
  CHECK(error_line("[robot\nmass = 85\n") == 1);
  CHECK(error_line("[robot]\nmass = 85\nmass = 86\n") == 3);
  CHECK(error_line("[profile]\n0 0.1 0\n") == 2);
  CHECK(error_line("[wrench]\n0 1 2 3\n") == 2);
  CHECK(error_line("[profile]\nspeed = 0.1\n") == 2);
  CHECK(error_line("[observer]\nform = fancy\n") == 2);
  CHECK(error_line("[features]\nstair_mode = maybe\n") == 2);
  CHECK(error_line("[terrain]\ntype = hills\n") == 2);
  CHECK(error_line("[robot]\ninertia = 1 2\n") == 2);

  CHECK_THROWS_WITH_AS(parse_config("[robot]\nmass = 85\n[nope]\n"),
                       doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[gait]\nstride = 0.2\n"),
                       doctest::Contains("gait.stride"), ConfigError);
}

TEST_CASE("semantic validation names the field and reports line 0") {
  const auto check_field = [](const std::string& text, const std::string& field) {
    CAPTURE(text);
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains(field.c_str()),
                         ConfigError);
    CHECK(error_line(text) == 0);
  };
  check_field("[sim]\ndt = -0.004\n", "sim.dt");
  check_field("[sim]\ndt = 0\n", "sim.dt");
  check_field("[robot]\nmass = 0\n", "robot.mass");
  check_field("[robot]\nmin_height = 0.6\n", "robot.min_height");
  check_field("[robot]\nheight = 0.8\n", "robot.height");
  check_field("[gait]\nduty_factor = 1.2\n", "duty_factor");
  check_field("[terrain]\ntype = stairs\ncount = 0\n", "terrain.count");
  check_field("[terrain]\ntype = rocks\nmax_height = 0\n", "terrain.max_height");
  check_field("[terrain]\ntype = file\n", "terrain.path");
  check_field("[terrain]\nresolution = 9\n", "terrain.extent");
  check_field("[terrain]\ntype = ramp\nangle_deg = 75\n", "terrain.angle_deg");
  check_field("[profile]\n1 0.1 0 0\n0.5 0.1 0 0\n", "profile.t");
  check_field("[profile]\n0 2.0 0 0\n", "command_cap");
  check_field("[wrench]\n2 1 0 0 0 0 0 0 0 0 0\n", "wrench.t_end");
  check_field("[sim]\ndt = 0.2\n", "observer.gain_lin");
  check_field("[sim]\ndt = 0.001\nduration = 100000\n", "sim.duration");
}

TEST_CASE("serialize/parse round-trips the default config") {
  const ScenarioConfig c;
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("serialize/parse round-trips randomized configs exactly") {
  Rng rng(2026);
  for (int i = 0; i < 200; ++i) {
    const ScenarioConfig c = random_config(rng);
    CAPTURE(i);
    REQUIRE_NOTHROW(validate_config(c));
    const ScenarioConfig back = parse_config(serialize_config(c));
    REQUIRE(back == c);
  }
}

TEST_CASE("set_config_value updates one dotted path and revalidates") {
  ScenarioConfig c;
  set_config_value(c, "observer.gain_lin", "100");
  CHECK(c.observer.gain_lin == 100.0);
  set_config_value(c, "sim.seed", "7");
  CHECK(c.sim.seed == 7);
  set_config_value(c, "features.stair_mode", "true");
  CHECK(c.features.stair_mode);
  set_config_value(c, "terrain.type", "stairs");
  CHECK(c.terrain.type == TerrainType::stairs);
  set_config_value(c, "gait.step_height", "0.09");
  CHECK(c.gait.step_height == 0.09);

  CHECK_THROWS_AS(set_config_value(c, "gain_lin", "5"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "observer.bogus", "5"), ConfigError);
  CHECK_THROWS_WITH_AS(set_config_value(c, "sim.dt", "-1"),
                       doctest::Contains("sim.dt"), ConfigError);
  CHECK(c.sim.dt == -1.0);  // set applied, validation rejected; caller discards
  c.sim.dt = 0.004;
  CHECK_THROWS_AS(set_config_value(c, "profile.t", "1"), ConfigError);
}

TEST_CASE("load_config reads a file and flags missing ones") {
  const char* path = "scenario_test_tmp.cfg";
  {
    std::ofstream out(path);
    out << "[sim]\nduration = 2\nseed = 5\n";
  }
  const ScenarioConfig c = load_config(path);
  CHECK(c.sim.duration == 2.0);
  CHECK(c.sim.seed == 5);
  std::remove(path);
  CHECK_THROWS_WITH_AS(load_config("does_not_exist.cfg"), doctest::Contains("open"),
                       ConfigError);
}

TEST_CASE("make_terrain: flat and ramp generators") {
  TerrainSpec spec;
  spec.type = TerrainType::flat;
  spec.height = 0.02;
  const HeightMap flat = make_terrain(spec, 1);
  CHECK(flat.cols() == 151);  // extent 6.0 at 0.04 resolution
  CHECK(flat.rows() == 76);
  CHECK(flat.height_at({0.0, 0.0}) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(flat.height_at({4.0, 1.0}) == doctest::Approx(0.02).epsilon(1e-12));

  spec = TerrainSpec{};
  spec.type = TerrainType::ramp;
  spec.angle_deg = 22.0;
  spec.start_x = 0.8;
  const HeightMap ramp = make_terrain(spec, 1);
  CHECK(ramp.height_at({0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
  const double slope = std::tan(22.0 * M_PI / 180.0);
  const double z1 = ramp.height_at({2.0, 0.0});
  const double z2 = ramp.height_at({3.0, 0.0});
  CHECK(z2 - z1 == doctest::Approx(slope).epsilon(1e-9));
}

TEST_CASE("make_terrain: paper-size staircase") {
  TerrainSpec spec;
  spec.type = TerrainType::stairs;
  spec.rise = 0.14;
  spec.tread = 0.48;
  spec.count = 6;
  spec.start_x = 0.8;
  const HeightMap stairs = make_terrain(spec, 1);
  CHECK(stairs.height_at({0.4, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
  for (int k = 1; k <= 6; ++k) {
    const double x = 0.8 + (k - 0.5) * 0.48;
    CHECK(stairs.height_at({x, 0.0}) == doctest::Approx(k * 0.14).epsilon(1e-9));
  }
  // top landing stays at the last step height
  CHECK(stairs.height_at({0.8 + 6 * 0.48 + 0.3, 0.0}) ==
        doctest::Approx(6 * 0.14).epsilon(1e-9));
}

TEST_CASE("make_terrain: rocks are seeded, bounded and flat before onset") {
  TerrainSpec spec;
  spec.type = TerrainType::rocks;
  spec.max_height = 0.12;
  spec.start_x = 0.8;
  const HeightMap a = make_terrain(spec, 42);
  const HeightMap b = make_terrain(spec, 42);
  const HeightMap c = make_terrain(spec, 43);
  double max_seen = 0.0;
  bool differs = false;
  for (int r = 0; r < a.rows(); ++r) {
    for (int col = 0; col < a.cols(); ++col) {
      CHECK(a.node(col, r) == b.node(col, r));
      differs = differs || a.node(col, r) != c.node(col, r);
      max_seen = std::max(max_seen, a.node(col, r));
      const double x = a.origin().x() + col * a.resolution();
      if (x < 0.8) CHECK(a.node(col, r) == 0.0);
    }
  }
  CHECK(differs);
  CHECK(max_seen <= 0.12 + 1e-12);
  CHECK(max_seen > 0.05);  // the field is actually rough
}

TEST_CASE("make_terrain: file type round-trips through the map format") {
  TerrainSpec spec;
  spec.type = TerrainType::flat;
  spec.height = 0.01;
  spec.extent = Vec2(2.0, 2.0);
  const HeightMap made = make_terrain(spec, 1);
  const char* path = "terrain_test_tmp.map";
  {
    std::ofstream out(path);
    made.save(out);
  }
  TerrainSpec file_spec;
  file_spec.type = TerrainType::file;
  file_spec.path = path;
  const HeightMap loaded = make_terrain(file_spec, 9);
  CHECK(loaded.cols() == made.cols());
  CHECK(loaded.rows() == made.rows());
  CHECK(loaded.height_at({0.5, 0.5}) == made.height_at({0.5, 0.5}));
  std::remove(path);
}
