#include "crawl/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace crawl {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> fields;
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

[[noreturn]] void bad_value(int line, const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError(line, "bad value '" + value + "' for " + key + " (expected " +
                              expected + ")");
}

double to_double(const std::string& value, int line, const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !std::isfinite(v)) {
    bad_value(line, key, value, "a finite number");
  }
  return v;
}

long to_int(const std::string& value, int line, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') bad_value(line, key, value, "an integer");
  return v;
}

uint64_t to_u64(const std::string& value, int line, const std::string& key) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos) {
    bad_value(line, key, value, "an unsigned integer");
  }
  return v;
}

bool to_bool(const std::string& value, int line, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(line, key, value, "true or false");
}

Vec2 to_vec2(const std::string& value, int line, const std::string& key) {
  const auto fields = split_fields(value);
  if (fields.size() != 2) bad_value(line, key, value, "2 numbers");
  return {to_double(fields[0], line, key), to_double(fields[1], line, key)};
}

Vec3 to_vec3(const std::string& value, int line, const std::string& key) {
  const auto fields = split_fields(value);
  if (fields.size() != 3) bad_value(line, key, value, "3 numbers");
  return {to_double(fields[0], line, key), to_double(fields[1], line, key),
          to_double(fields[2], line, key)};
}

TerrainType to_terrain_type(const std::string& value, int line) {
  if (value == "flat") return TerrainType::flat;
  if (value == "ramp") return TerrainType::ramp;
  if (value == "stairs") return TerrainType::stairs;
  if (value == "rocks") return TerrainType::rocks;
  if (value == "file") return TerrainType::file;
  bad_value(line, "terrain.type", value, "flat|ramp|stairs|rocks|file");
}

ObserverForm to_form(const std::string& value, int line) {
  if (value == "plain") return ObserverForm::plain;
  if (value == "spatial") return ObserverForm::spatial;
  bad_value(line, "observer.form", value, "plain|spatial");
}

bool known_section(const std::string& section) {
  return section == "robot" || section == "gait" || section == "terrain" ||
         section == "observer" || section == "features" || section == "profile" ||
         section == "wrench" || section == "sim";
}

void apply_key(ScenarioConfig& c, const std::string& section, const std::string& key,
               const std::string& value, int line) {
  const std::string name = section + "." + key;
  if (section == "robot") {
    RobotParams& r = c.robot;
    if (key == "mass") r.mass = to_double(value, line, name);
    else if (key == "inertia") r.inertia_diag = to_vec3(value, line, name);
    else if (key == "com_offset") r.com_offset = to_vec3(value, line, name);
    else if (key == "hip_x") r.hip_x = to_double(value, line, name);
    else if (key == "hip_y") r.hip_y = to_double(value, line, name);
    else if (key == "upper_leg") r.upper_leg = to_double(value, line, name);
    else if (key == "lower_leg") r.lower_leg = to_double(value, line, name);
    else if (key == "height") r.height = to_double(value, line, name);
    else if (key == "min_height") r.min_height = to_double(value, line, name);
    else throw ConfigError(line, "unknown key " + name);
  } else if (section == "gait") {
    GaitParams& g = c.gait;
    if (key == "step_max") g.step_max = to_vec3(value, line, name);
    else if (key == "step_tr") g.step_tr = to_vec3(value, line, name);
    else if (key == "command_cap") g.command_cap = to_vec3(value, line, name);
    else if (key == "velocity_tr") g.velocity_tr = to_double(value, line, name);
    else if (key == "duty_factor") g.duty_factor = to_double(value, line, name);
    else if (key == "t_load_unload") g.t_load_unload = to_double(value, line, name);
    else if (key == "default_cycle") g.default_cycle = to_double(value, line, name);
    else if (key == "step_height") g.step_height = to_double(value, line, name);
    else if (key == "apex_ratio") g.apex_ratio = to_double(value, line, name);
    else if (key == "stance_offset") g.stance_offset = to_vec2(value, line, name);
    else if (key == "com_margin") g.com_margin = to_double(value, line, name);
    else if (key == "search_rate") g.search_rate = to_double(value, line, name);
    else if (key == "search_limit") g.search_limit = to_double(value, line, name);
    else if (key == "touchdown_force") g.touchdown_force = to_double(value, line, name);
    else if (key == "touchdown_ticks") g.touchdown_ticks = static_cast<int>(to_int(value, line, name));
    else if (key == "clearance_margin") g.clearance_margin = to_double(value, line, name);
    else if (key == "clearance_samples") g.clearance_samples = static_cast<int>(to_int(value, line, name));
    else if (key == "reflex_cone_half_angle") g.reflex_cone_half_angle = to_double(value, line, name);
    else if (key == "reflex_retract_height") g.reflex_retract_height = to_double(value, line, name);
    else if (key == "stair_tolerance") g.stair_tolerance = to_double(value, line, name);
    else if (key == "edge_threshold") g.edge_threshold = to_double(value, line, name);
    else if (key == "min_edge_distance") g.min_edge_distance = to_double(value, line, name);
    else if (key == "correction_window") g.correction_window = to_double(value, line, name);
    else throw ConfigError(line, "unknown key " + name);
  } else if (section == "terrain") {
    TerrainSpec& t = c.terrain;
    if (key == "type") t.type = to_terrain_type(value, line);
    else if (key == "resolution") t.resolution = to_double(value, line, name);
    else if (key == "origin") t.origin = to_vec2(value, line, name);
    else if (key == "extent") t.extent = to_vec2(value, line, name);
    else if (key == "height") t.height = to_double(value, line, name);
    else if (key == "angle_deg") t.angle_deg = to_double(value, line, name);
    else if (key == "rise") t.rise = to_double(value, line, name);
    else if (key == "tread") t.tread = to_double(value, line, name);
    else if (key == "count") t.count = static_cast<int>(to_int(value, line, name));
    else if (key == "turn") t.turn = static_cast<int>(to_int(value, line, name));
    else if (key == "max_height") t.max_height = to_double(value, line, name);
    else if (key == "start_x") t.start_x = to_double(value, line, name);
    else if (key == "path") t.path = value;
    else throw ConfigError(line, "unknown key " + name);
  } else if (section == "observer") {
    ObserverParams& o = c.observer;
    if (key == "enabled") o.enabled = to_bool(value, line, name);
    else if (key == "form") o.form = to_form(value, line);
    else if (key == "gain_lin") o.gain_lin = to_double(value, line, name);
    else if (key == "gain_ang") o.gain_ang = to_double(value, line, name);
    else if (key == "compensation") o.compensation = to_bool(value, line, name);
    else if (key == "zmp_correction") o.zmp_correction = to_bool(value, line, name);
    else if (key == "noise_sigma") o.noise_sigma = to_double(value, line, name);
    else throw ConfigError(line, "unknown key " + name);
  } else if (section == "features") {
    FeatureToggles& f = c.features;
    if (key == "vision_stepping") f.vision_stepping = to_bool(value, line, name);
    else if (key == "clearance_opt") f.clearance_opt = to_bool(value, line, name);
    else if (key == "step_reflex") f.step_reflex = to_bool(value, line, name);
    else if (key == "height_reflex") f.height_reflex = to_bool(value, line, name);
    else if (key == "stair_mode") f.stair_mode = to_bool(value, line, name);
    else if (key == "smart_terrain") f.smart_terrain = to_bool(value, line, name);
    else throw ConfigError(line, "unknown key " + name);
  } else if (section == "sim") {
    SimParams& s = c.sim;
    if (key == "dt") s.dt = to_double(value, line, name);
    else if (key == "duration") s.duration = to_double(value, line, name);
    else if (key == "seed") s.seed = to_u64(value, line, name);
    else throw ConfigError(line, "unknown key " + name);
  } else if (section == "profile" || section == "wrench") {
    throw ConfigError(line, "[" + section + "] holds numeric rows, not keys");
  } else {
    throw ConfigError(line, "unknown section [" + section + "]");
  }
}

ProfileRow parse_profile_row(const std::string& text, int line) {
  const auto fields = split_fields(text);
  if (fields.size() != 4) {
    throw ConfigError(line, "profile row needs 4 numbers: t vx vy yaw_rate");
  }
  ProfileRow row;
  row.t = to_double(fields[0], line, "profile.t");
  row.velocity = {to_double(fields[1], line, "profile.vx"),
                  to_double(fields[2], line, "profile.vy")};
  row.yaw_rate = to_double(fields[3], line, "profile.yaw_rate");
  return row;
}

WrenchRow parse_wrench_row(const std::string& text, int line) {
  const auto fields = split_fields(text);
  if (fields.size() != 11) {
    throw ConfigError(line,
                      "wrench row needs 11 numbers: t0 t1 fx fy fz tx ty tz px py pz");
  }
  double v[11];
  for (int i = 0; i < 11; ++i) v[i] = to_double(fields[i], line, "wrench row");
  WrenchRow row;
  row.t_start = v[0];
  row.t_end = v[1];
  row.force = {v[2], v[3], v[4]};
  row.torque = {v[5], v[6], v[7]};
  row.application = {v[8], v[9], v[10]};
  return row;
}

/// Shortest decimal form that parses back to the same double.
std::string fmt(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string fmt(const Vec2& v) { return fmt(v.x()) + " " + fmt(v.y()); }
std::string fmt(const Vec3& v) {
  return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
}
const char* fmt(bool v) { return v ? "true" : "false"; }

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ConfigError(0, field + " " + why);
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0) || !std::isfinite(v)) bad_field(field, "must be positive");
}

void require_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) bad_field(field, "must be finite");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    if (section.empty()) {
      throw ConfigError(line_no, "content before the first section header");
    }
    if (section == "profile") {
      config.profile.push_back(parse_profile_row(line, line_no));
      continue;
    }
    if (section == "wrench") {
      config.wrenches.push_back(parse_wrench_row(line, line_no));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError(line_no, "duplicate key " + section + "." + key);
    }
    apply_key(config, section, key, value, line_no);
  }
  validate_config(config);
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[robot]\n";
  out << "mass = " << fmt(c.robot.mass) << "\n";
  out << "inertia = " << fmt(c.robot.inertia_diag) << "\n";
  out << "com_offset = " << fmt(c.robot.com_offset) << "\n";
  out << "hip_x = " << fmt(c.robot.hip_x) << "\n";
  out << "hip_y = " << fmt(c.robot.hip_y) << "\n";
  out << "upper_leg = " << fmt(c.robot.upper_leg) << "\n";
  out << "lower_leg = " << fmt(c.robot.lower_leg) << "\n";
  out << "height = " << fmt(c.robot.height) << "\n";
  out << "min_height = " << fmt(c.robot.min_height) << "\n";
  out << "\n[gait]\n";
  out << "step_max = " << fmt(c.gait.step_max) << "\n";
  out << "step_tr = " << fmt(c.gait.step_tr) << "\n";
  out << "command_cap = " << fmt(c.gait.command_cap) << "\n";
  out << "velocity_tr = " << fmt(c.gait.velocity_tr) << "\n";
  out << "duty_factor = " << fmt(c.gait.duty_factor) << "\n";
  out << "t_load_unload = " << fmt(c.gait.t_load_unload) << "\n";
  out << "default_cycle = " << fmt(c.gait.default_cycle) << "\n";
  out << "step_height = " << fmt(c.gait.step_height) << "\n";
  out << "apex_ratio = " << fmt(c.gait.apex_ratio) << "\n";
  out << "stance_offset = " << fmt(c.gait.stance_offset) << "\n";
  out << "com_margin = " << fmt(c.gait.com_margin) << "\n";
  out << "search_rate = " << fmt(c.gait.search_rate) << "\n";
  out << "search_limit = " << fmt(c.gait.search_limit) << "\n";
  out << "touchdown_force = " << fmt(c.gait.touchdown_force) << "\n";
  out << "touchdown_ticks = " << c.gait.touchdown_ticks << "\n";
  out << "clearance_margin = " << fmt(c.gait.clearance_margin) << "\n";
  out << "clearance_samples = " << c.gait.clearance_samples << "\n";
  out << "reflex_cone_half_angle = " << fmt(c.gait.reflex_cone_half_angle) << "\n";
  out << "reflex_retract_height = " << fmt(c.gait.reflex_retract_height) << "\n";
  out << "stair_tolerance = " << fmt(c.gait.stair_tolerance) << "\n";
  out << "edge_threshold = " << fmt(c.gait.edge_threshold) << "\n";
  out << "min_edge_distance = " << fmt(c.gait.min_edge_distance) << "\n";
  out << "correction_window = " << fmt(c.gait.correction_window) << "\n";
  out << "\n[terrain]\n";
  switch (c.terrain.type) {
    case TerrainType::flat: out << "type = flat\n"; break;
    case TerrainType::ramp: out << "type = ramp\n"; break;
    case TerrainType::stairs: out << "type = stairs\n"; break;
    case TerrainType::rocks: out << "type = rocks\n"; break;
    case TerrainType::file: out << "type = file\n"; break;
  }
  out << "resolution = " << fmt(c.terrain.resolution) << "\n";
  out << "origin = " << fmt(c.terrain.origin) << "\n";
  out << "extent = " << fmt(c.terrain.extent) << "\n";
  out << "height = " << fmt(c.terrain.height) << "\n";
  out << "angle_deg = " << fmt(c.terrain.angle_deg) << "\n";
  out << "rise = " << fmt(c.terrain.rise) << "\n";
  out << "tread = " << fmt(c.terrain.tread) << "\n";
  out << "count = " << c.terrain.count << "\n";
  out << "turn = " << c.terrain.turn << "\n";
  out << "max_height = " << fmt(c.terrain.max_height) << "\n";
  out << "start_x = " << fmt(c.terrain.start_x) << "\n";
  if (!c.terrain.path.empty()) out << "path = " << c.terrain.path << "\n";
  out << "\n[observer]\n";
  out << "enabled = " << fmt(c.observer.enabled) << "\n";
  out << "form = " << (c.observer.form == ObserverForm::plain ? "plain" : "spatial")
      << "\n";
  out << "gain_lin = " << fmt(c.observer.gain_lin) << "\n";
  out << "gain_ang = " << fmt(c.observer.gain_ang) << "\n";
  out << "compensation = " << fmt(c.observer.compensation) << "\n";
  out << "zmp_correction = " << fmt(c.observer.zmp_correction) << "\n";
  out << "noise_sigma = " << fmt(c.observer.noise_sigma) << "\n";
  out << "\n[features]\n";
  out << "vision_stepping = " << fmt(c.features.vision_stepping) << "\n";
  out << "clearance_opt = " << fmt(c.features.clearance_opt) << "\n";
  out << "step_reflex = " << fmt(c.features.step_reflex) << "\n";
  out << "height_reflex = " << fmt(c.features.height_reflex) << "\n";
  out << "stair_mode = " << fmt(c.features.stair_mode) << "\n";
  out << "smart_terrain = " << fmt(c.features.smart_terrain) << "\n";
  out << "\n[profile]\n";
  for (const ProfileRow& row : c.profile) {
    out << fmt(row.t) << " " << fmt(row.velocity) << " " << fmt(row.yaw_rate) << "\n";
  }
  out << "\n[wrench]\n";
  for (const WrenchRow& row : c.wrenches) {
    out << fmt(row.t_start) << " " << fmt(row.t_end) << " " << fmt(row.force) << " "
        << fmt(row.torque) << " " << fmt(row.application) << "\n";
  }
  out << "\n[sim]\n";
  out << "dt = " << fmt(c.sim.dt) << "\n";
  out << "duration = " << fmt(c.sim.duration) << "\n";
  out << "seed = " << c.sim.seed << "\n";
  return out.str();
}

void set_config_value(ScenarioConfig& config, const std::string& path,
                      const std::string& value) {
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw ConfigError(0, "parameter path must be section.key, got '" + path + "'");
  }
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  if (!known_section(section)) {
    throw ConfigError(0, "unknown section [" + section + "]");
  }
  apply_key(config, section, key, trim(value), 0);
  validate_config(config);
}

void validate_config(const ScenarioConfig& c) {
  const RobotParams& r = c.robot;
  require_positive(r.mass, "robot.mass");
  for (int i = 0; i < 3; ++i) require_positive(r.inertia_diag(i), "robot.inertia");
  if (!r.com_offset.allFinite()) bad_field("robot.com_offset", "must be finite");
  require_positive(r.hip_x, "robot.hip_x");
  require_positive(r.hip_y, "robot.hip_y");
  require_positive(r.upper_leg, "robot.upper_leg");
  require_positive(r.lower_leg, "robot.lower_leg");
  require_positive(r.height, "robot.height");
  if (!(r.height < r.upper_leg + r.lower_leg)) {
    bad_field("robot.height", "must be below the leg reach");
  }
  require_positive(r.min_height, "robot.min_height");
  if (!(r.min_height <= r.height)) {
    bad_field("robot.min_height", "must not exceed robot.height");
  }

  try {
    c.gait.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(0, err.what());
  }

  const TerrainSpec& t = c.terrain;
  require_positive(t.resolution, "terrain.resolution");
  if (!t.origin.allFinite()) bad_field("terrain.origin", "must be finite");
  for (int i = 0; i < 2; ++i) {
    if (!(t.extent(i) >= t.resolution) || !std::isfinite(t.extent(i))) {
      bad_field("terrain.extent", "must cover at least one grid cell");
    }
  }
  require_finite(t.start_x, "terrain.start_x");
  switch (t.type) {
    case TerrainType::flat:
      require_finite(t.height, "terrain.height");
      break;
    case TerrainType::ramp:
      if (!(std::abs(t.angle_deg) < 60.0)) {
        bad_field("terrain.angle_deg", "must be within (-60, 60)");
      }
      break;
    case TerrainType::stairs:
      require_positive(t.rise, "terrain.rise");
      require_positive(t.tread, "terrain.tread");
      if (t.count < 1) bad_field("terrain.count", "must be at least 1");
      if (t.turn < -1 || t.turn > 1) bad_field("terrain.turn", "must be -1, 0 or 1");
      break;
    case TerrainType::rocks:
      require_positive(t.max_height, "terrain.max_height");
      break;
    case TerrainType::file:
      if (t.path.empty()) bad_field("terrain.path", "required for type = file");
      break;
  }

  const ObserverParams& o = c.observer;
  require_positive(o.gain_lin, "observer.gain_lin");
  require_positive(o.gain_ang, "observer.gain_ang");
  if (!(o.noise_sigma >= 0) || !std::isfinite(o.noise_sigma)) {
    bad_field("observer.noise_sigma", "must be non-negative");
  }

  double prev_t = -1.0;
  for (const ProfileRow& row : c.profile) {
    if (!std::isfinite(row.t) || row.t < 0) bad_field("profile.t", "must be >= 0");
    if (!(row.t > prev_t)) bad_field("profile.t", "rows must be strictly time-sorted");
    prev_t = row.t;
    if (!row.velocity.allFinite() || !std::isfinite(row.yaw_rate)) {
      bad_field("profile", "velocities must be finite");
    }
    if (std::abs(row.velocity.x()) > c.gait.command_cap(0) ||
        std::abs(row.velocity.y()) > c.gait.command_cap(1) ||
        std::abs(row.yaw_rate) > c.gait.command_cap(2)) {
      bad_field("profile", "command exceeds gait.command_cap");
    }
  }

  for (const WrenchRow& row : c.wrenches) {
    if (!std::isfinite(row.t_start) || row.t_start < 0) {
      bad_field("wrench.t_start", "must be >= 0");
    }
    if (!(row.t_end > row.t_start)) {
      bad_field("wrench.t_end", "must exceed t_start");
    }
    if (!row.force.allFinite() || !row.torque.allFinite() ||
        !row.application.allFinite()) {
      bad_field("wrench", "entries must be finite");
    }
  }

  const SimParams& s = c.sim;
  require_positive(s.dt, "sim.dt");
  require_positive(s.duration, "sim.duration");
  if (s.duration / s.dt > 2e6) bad_field("sim.duration", "exceeds 2e6 ticks");
  if (o.enabled && (o.gain_lin * s.dt >= 1.0 || o.gain_ang * s.dt >= 1.0)) {
    bad_field("observer.gain_lin", "gain * sim.dt must stay below 1 (explicit Euler)");
  }
}

HeightMap make_terrain(const TerrainSpec& spec, uint64_t seed) {
  const int cols = static_cast<int>(std::lround(spec.extent.x() / spec.resolution)) + 1;
  const int rows = static_cast<int>(std::lround(spec.extent.y() / spec.resolution)) + 1;
  switch (spec.type) {
    case TerrainType::flat:
      return HeightMap::flat(spec.resolution, spec.origin, cols, rows, spec.height);
    case TerrainType::ramp:
      return HeightMap::ramp(spec.resolution, spec.origin, cols, rows,
                             spec.angle_deg * M_PI / 180.0, spec.start_x);
    case TerrainType::stairs:
      return HeightMap::stairs(spec.resolution, spec.origin, cols, rows, spec.rise,
                               spec.tread, spec.count, spec.start_x, spec.turn);
    case TerrainType::rocks:
      return HeightMap::rocks(spec.resolution, spec.origin, cols, rows, spec.max_height,
                              spec.start_x, seed);
    case TerrainType::file:
      return HeightMap::load(spec.path);
  }
  throw ConfigError(0, "unreachable terrain type");
}

}  // namespace crawl
