#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crawl/geometry.hpp"
#include "crawl/height_map.hpp"
#include "crawl/step_planner.hpp"
#include "crawl/wrench_observer.hpp"

namespace crawl {

/// Parse/validation failure; line is 0 when the error is not tied to a line.
struct ConfigError : std::runtime_error {
  ConfigError(int line_, const std::string& what_)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what_
                                     : what_),
        line(line_) {}
  int line;
};

enum class TerrainType { flat, ramp, stairs, rocks, file };

struct TerrainSpec {
  TerrainType type = TerrainType::flat;
  double resolution = 0.04;
  Vec2 origin{-1.0, -1.5};
  Vec2 extent{6.0, 3.0};     // map size [m]
  double height = 0.0;       // flat offset
  double angle_deg = 22.0;   // ramp
  double rise = 0.14;        // stairs
  double tread = 0.48;
  int count = 6;
  int turn = 0;              // 0 straight, +1 left, -1 right
  double max_height = 0.12;  // rocks
  double start_x = 0.8;      // feature onset (ramp/stairs/rocks)
  std::string path;          // file

  bool operator==(const TerrainSpec& o) const {
    return type == o.type && resolution == o.resolution &&
           origin.cwiseEqual(o.origin).all() && extent.cwiseEqual(o.extent).all() &&
           height == o.height && angle_deg == o.angle_deg && rise == o.rise &&
           tread == o.tread && count == o.count && turn == o.turn &&
           max_height == o.max_height && start_x == o.start_x && path == o.path;
  }
};

struct RobotParams {
  double mass = 85.0;
  Vec3 inertia_diag{4.0, 8.0, 9.0};
  Vec3 com_offset = Vec3::Zero();
  double hip_x = 0.375;
  double hip_y = 0.207;
  double upper_leg = 0.35;
  double lower_leg = 0.346;
  double height = 0.55;      // desired h_r
  double min_height = 0.30;  // halt below this

  bool operator==(const RobotParams& o) const {
    return mass == o.mass && inertia_diag.cwiseEqual(o.inertia_diag).all() &&
           com_offset.cwiseEqual(o.com_offset).all() && hip_x == o.hip_x &&
           hip_y == o.hip_y && upper_leg == o.upper_leg && lower_leg == o.lower_leg &&
           height == o.height && min_height == o.min_height;
  }
};

struct ObserverParams {
  bool enabled = true;
  ObserverForm form = ObserverForm::plain;
  double gain_lin = 10.0;
  double gain_ang = 1.0;
  bool compensation = true;
  bool zmp_correction = true;
  double noise_sigma = 0.0;  // injected-force measurement noise [N]

  bool operator==(const ObserverParams&) const = default;
};

struct FeatureToggles {
  bool vision_stepping = false;
  bool clearance_opt = false;
  bool step_reflex = true;
  bool height_reflex = true;
  bool stair_mode = false;
  bool smart_terrain = true;

  bool operator==(const FeatureToggles&) const = default;
};

struct ProfileRow {
  double t = 0;
  Vec2 velocity = Vec2::Zero();
  double yaw_rate = 0;

  bool operator==(const ProfileRow& o) const {
    return t == o.t && velocity.cwiseEqual(o.velocity).all() && yaw_rate == o.yaw_rate;
  }
};

struct WrenchRow {
  double t_start = 0;
  double t_end = 0;
  Vec3 force = Vec3::Zero();        // world frame
  Vec3 torque = Vec3::Zero();       // world frame, about the application point
  Vec3 application = Vec3::Zero();  // base frame

  bool operator==(const WrenchRow& o) const {
    return t_start == o.t_start && t_end == o.t_end &&
           force.cwiseEqual(o.force).all() && torque.cwiseEqual(o.torque).all() &&
           application.cwiseEqual(o.application).all();
  }
};

struct SimParams {
  double dt = 0.004;
  double duration = 10.0;
  uint64_t seed = 1;

  bool operator==(const SimParams&) const = default;
};

struct ScenarioConfig {
  RobotParams robot;
  GaitParams gait;
  TerrainSpec terrain;
  ObserverParams observer;
  FeatureToggles features;
  std::vector<ProfileRow> profile;
  std::vector<WrenchRow> wrenches;
  SimParams sim;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Line-oriented config text -> config. Unknown sections/keys, malformed
/// values, and failed validation raise ConfigError with the line number.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Set one value by dotted path, e.g. "observer.gain_lin" = "100".
void set_config_value(ScenarioConfig& config, const std::string& path,
                      const std::string& value);

/// Range/consistency checks shared by parse and the C API.
void validate_config(const ScenarioConfig& config);

/// Build the terrain for a scenario (seed feeds the rocks generator).
HeightMap make_terrain(const TerrainSpec& spec, uint64_t seed);

}  // namespace crawl
