#include "crawl/step_planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace crawl {

namespace {

[[noreturn]] void bad_param(const std::string& field) {
  throw std::invalid_argument("gait parameter out of range: " + field);
}

}  // namespace

const char* leg_name(LegId leg) {
  switch (leg) {
    case LegId::LF: return "LF";
    case LegId::RF: return "RF";
    case LegId::LH: return "LH";
    case LegId::RH: return "RH";
  }
  return "??";
}

bool is_front(LegId leg) { return leg == LegId::LF || leg == LegId::RF; }

bool is_left(LegId leg) { return leg == LegId::LF || leg == LegId::LH; }

LegId pair_of(LegId leg) {
  switch (leg) {
    case LegId::LF: return LegId::RF;
    case LegId::RF: return LegId::LF;
    case LegId::LH: return LegId::RH;
    case LegId::RH: return LegId::LH;
  }
  return leg;
}

void GaitParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(step_max(i) > 0)) bad_param("step_max");
    if (!(step_tr(i) > 0) || !(step_tr(i) < step_max(i))) bad_param("step_tr");
    if (!(command_cap(i) > 0)) bad_param("command_cap");
  }
  if (!(velocity_tr > 0)) bad_param("velocity_tr");
  if (!(duty_factor > 0) || !(duty_factor < 1)) bad_param("duty_factor");
  if (!(t_load_unload >= 0)) bad_param("t_load_unload");
  if (!(default_cycle > t_load_unload)) bad_param("default_cycle");
  if (!(step_height > 0)) bad_param("step_height");
  if (!(apex_ratio > 0) || !(apex_ratio < 1)) bad_param("apex_ratio");
  if (!stance_offset.allFinite()) bad_param("stance_offset");
  if (!(com_margin > 0)) bad_param("com_margin");
  if (!(search_rate > 0)) bad_param("search_rate");
  if (!(search_limit > 0)) bad_param("search_limit");
  if (!(touchdown_force > 0)) bad_param("touchdown_force");
  if (touchdown_ticks < 1) bad_param("touchdown_ticks");
  if (!(clearance_margin >= 0)) bad_param("clearance_margin");
  if (clearance_samples < 2) bad_param("clearance_samples");
  if (!(reflex_cone_half_angle > 0) || !(reflex_cone_half_angle < M_PI / 2)) {
    bad_param("reflex_cone_half_angle");
  }
  if (!(reflex_retract_height > 0)) bad_param("reflex_retract_height");
  if (!(stair_tolerance > 0)) bad_param("stair_tolerance");
  if (!(edge_threshold > 0)) bad_param("edge_threshold");
  if (!(min_edge_distance > 0)) bad_param("min_edge_distance");
  if (!(correction_window > min_edge_distance)) bad_param("correction_window");
}

DefaultStep default_step(const StepCommand& cmd, const GaitParams& params) {
  const Vec3 v(cmd.velocity.x(), cmd.velocity.y(), cmd.yaw_rate);
  if (!v.allFinite()) throw std::invalid_argument("step command must be finite");
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v(i)) > params.command_cap(i)) {
      throw std::invalid_argument("step command exceeds the configured cap");
    }
  }

  DefaultStep out;
  double t_cycle = params.default_cycle;
  bool any = false;
  Vec3 step = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    const double amp = 2.0 * params.step_max(i) / M_PI;
    const double gain = params.step_tr(i) / (params.step_max(i) * params.velocity_tr);
    step(i) = amp * std::atan(gain * v(i));
    if (std::abs(v(i)) > 1e-9) {
      const double t_axis = std::abs(step(i)) / std::abs(v(i));
      t_cycle = any ? std::min(t_cycle, t_axis) : t_axis;
      any = true;
    }
  }
  if (t_cycle <= params.t_load_unload) {
    throw std::domain_error("commanded velocity leaves no time to swing");
  }
  out.step_xy = step.head<2>();
  out.step_heading = step(2);
  out.t_cycle = t_cycle;
  out.t_move_body = (t_cycle - params.t_load_unload) * params.duty_factor;
  out.t_swing = (t_cycle - params.t_load_unload) * (1.0 - params.duty_factor);
  return out;
}

Vec2 heading_to_planar(double heading_step, const Vec3& hip_in_base) {
  // XY of [0,0,dH] x hip.
  return Vec2(-heading_step * hip_in_base.y(), heading_step * hip_in_base.x());
}

Vec2 step_about_foot(const Vec2& default_step_xy, const Vec3& hip, const Vec3& foot,
                     const Vec2& stance_offset) {
  return default_step_xy + stance_offset + (hip - foot).head<2>();
}

Vec3 SwingPlan::position(double t) const {
  const double px = eval_quintic(x, t).position;
  const double py = eval_quintic(y, t).position;
  const double pz = t < apex_time ? eval_quintic(z_up, t).position
                                  : eval_quintic(z_down, t - z_down.start_time).position;
  return liftoff + world_from_swing * Vec3(px, py, pz);
}

Vec3 SwingPlan::velocity(double t) const {
  const double vx = eval_quintic(x, t).velocity;
  const double vy = eval_quintic(y, t).velocity;
  const double vz = t < apex_time ? eval_quintic(z_up, t).velocity
                                  : eval_quintic(z_down, t - z_down.start_time).velocity;
  return world_from_swing * Vec3(vx, vy, vz);
}

Vec3 SwingPlan::target() const { return position(duration); }

SwingPlan plan_swing(const Vec3& liftoff_world, const Mat3& world_from_swing,
                     const Vec2& displacement_xy, double step_height, double apex_ratio,
                     double t_swing, double z_end) {
  if (!(t_swing > 0) || !std::isfinite(t_swing)) {
    throw std::invalid_argument("swing duration must be positive");
  }
  if (!(step_height >= 0)) throw std::invalid_argument("step height must be >= 0");
  if (!(apex_ratio > 0) || !(apex_ratio < 1)) {
    throw std::invalid_argument("apex ratio must lie in (0,1)");
  }

  SwingPlan plan;
  plan.world_from_swing = world_from_swing;
  plan.liftoff = liftoff_world;
  plan.duration = t_swing;
  plan.apex_time = apex_ratio * t_swing;

  BoundaryConditions bc;
  bc.pf = displacement_xy.x();
  plan.x = solve_quintic(bc, t_swing);
  bc.pf = displacement_xy.y();
  plan.y = solve_quintic(bc, t_swing);
  bc.pf = step_height;
  plan.z_up = solve_quintic(bc, plan.apex_time);
  bc.p0 = step_height;
  bc.pf = z_end;
  plan.z_down = solve_quintic(bc, t_swing - plan.apex_time);
  plan.z_down.start_time = plan.apex_time;
  return plan;
}

SwingPlan reschedule_swing(const SwingPlan& plan, double t_now, double new_duration) {
  if (t_now >= plan.duration || new_duration <= t_now || new_duration == plan.duration) {
    return plan;
  }
  SwingPlan out = plan;
  out.duration = new_duration;
  out.x = reschedule_quintic(plan.x, t_now, new_duration);
  out.y = reschedule_quintic(plan.y, t_now, new_duration);

  const double ratio = plan.apex_time / plan.duration;
  if (t_now >= plan.apex_time) {
    // Already descending: stretch the descent on its own axis.
    out.z_down = reschedule_quintic(plan.z_down, t_now - plan.apex_time,
                                    new_duration - plan.apex_time);
    out.z_down.start_time = plan.apex_time;
    return out;
  }
  // Keep the apex ratio; if the new apex would land behind the switch time,
  // keep a sliver of ascent so the apex height is still reached.
  const double apex = std::max(ratio * new_duration,
                               t_now + 0.05 * (new_duration - t_now));
  out.apex_time = apex;
  out.z_up = reschedule_quintic(plan.z_up, t_now, apex);
  const BoundaryConditions old_down = boundary_conditions(plan.z_down);
  BoundaryConditions down;
  down.p0 = boundary_conditions(plan.z_up).pf;
  down.pf = old_down.pf;
  out.z_down = solve_quintic(down, new_duration - apex);
  out.z_down.start_time = apex;
  return out;
}

Vec3 search_position(const SwingPlan& plan, const Vec3& terrain_normal, double rate,
                     double elapsed) {
  const double n = terrain_normal.norm();
  if (n < 1e-9) throw std::invalid_argument("terrain normal must be nonzero");
  return plan.target() - (terrain_normal / n) * (rate * std::max(elapsed, 0.0));
}

VisionTarget vision_correct_target(const HeightMap& map, const Vec3& target) {
  VisionTarget out{target, false};
  if (map.contains(target.head<2>())) {
    out.point.z() = map.height_at(target.head<2>());
    out.corrected = true;
  }
  return out;
}

Mat3 compute_swing_frame(const Vec3& foot, const Vec3& target,
                         const Mat3& world_from_base, const Vec3* terrain_normal) {
  const Vec3 segment = target - foot;
  if (segment.norm() < 1e-9) {
    throw std::invalid_argument("swing frame needs distinct foot and target");
  }
  const Vec3 base_x = world_from_base.col(0);
  const Vec3 base_y = world_from_base.col(1);
  Vec3 z = segment.cross(base_y);
  if (z.norm() < 1e-9 * segment.norm()) {
    throw std::invalid_argument("foot-to-target segment is parallel to base Y");
  }
  z.normalize();
  if (z.z() < 0) z = -z;  // backward steps: keep the frame upright
  Vec3 y = z.cross(base_x);
  if (y.norm() < 1e-9) {
    throw std::invalid_argument("swing Z is parallel to the base X axis");
  }
  y.normalize();
  Vec3 x = y.cross(z);

  if (terrain_normal != nullptr) {
    // Replace Z by the component of the reference normal inside the swing
    // plane (remove its X component), then rebuild Y.
    Vec3 zp = *terrain_normal - terrain_normal->dot(x) * x;
    if (zp.norm() < 1e-9) {
      throw std::domain_error("terrain normal lies along the swing X axis");
    }
    zp.normalize();
    if (zp.z() < 0) zp = -zp;
    z = zp;
    y = z.cross(x).normalized();
    x = y.cross(z);
  }

  Mat3 frame;
  frame.col(0) = x;
  frame.col(1) = y;
  frame.col(2) = z;
  return frame;
}

ClearanceResult optimize_clearance(const HeightMap& map, const Vec3& foot,
                                   const Vec3& target, const GaitParams& params) {
  const int n = params.clearance_samples;
  const Vec3 segment = target - foot;
  const double length = segment.norm();
  if (length < 1e-9) return {params.step_height, params.apex_ratio};
  const Vec3 dir = segment / length;
  // Vertical deficits project onto the swing Z axis (normal to the segment
  // inside its vertical plane) with a cos(slope) factor.
  const double cos_slope = std::sqrt(std::max(0.0, 1.0 - dir.z() * dir.z()));

  double best = 0.0;
  int best_k = 0;
  for (int k = 0; k <= n; ++k) {
    const Vec3 point = foot + (static_cast<double>(k) / n) * segment;
    const double terrain = map.height_at(point.head<2>());  // may throw
    const double deficit = std::max(terrain - point.z(), 0.0) * cos_slope;
    if (deficit > best) {
      best = deficit;
      best_k = k;
    }
  }
  if (best <= 1e-12) return {params.step_height, params.apex_ratio};
  ClearanceResult out;
  out.step_height = std::max(params.step_height, best + params.clearance_margin);
  out.apex_ratio = std::clamp(static_cast<double>(best_k) / n, 0.15, 0.85);
  return out;
}

CorrectedStep conservative_step_correction(const HeightMap& map, const Vec3& target,
                                           const Vec2& motion_dir,
                                           const GaitParams& params) {
  const double dir_norm = motion_dir.norm();
  if (dir_norm < 1e-9) {
    throw std::invalid_argument("motion direction must be nonzero");
  }
  const Vec2 dir = motion_dir / dir_norm;
  const double ds = 0.5 * map.resolution();
  const int half = static_cast<int>(std::ceil(params.correction_window / ds));

  // Sample the scan line; out-of-map samples truncate the window.
  std::vector<double> s_at, h_at;
  int target_idx = -1;
  for (int i = -half; i <= half; ++i) {
    const double s = i * ds;
    const Vec2 xy = target.head<2>() + s * dir;
    if (!map.contains(xy)) {
      if (i < 0) {
        s_at.clear();
        h_at.clear();
        continue;  // restart after the gap; the window start is off-map
      }
      break;
    }
    if (i == 0) target_idx = static_cast<int>(s_at.size());
    s_at.push_back(s);
    h_at.push_back(map.height_at(xy));
  }
  if (target_idx < 0) return {target, false, true};

  // Edge positions: height change above threshold across one map cell.
  const int span = std::max(1, static_cast<int>(std::round(map.resolution() / ds)));
  std::vector<double> edges;
  for (size_t i = 0; i + span < s_at.size(); ++i) {
    if (std::abs(h_at[i + span] - h_at[i]) > params.edge_threshold) {
      const double mid = 0.5 * (s_at[i] + s_at[i + span]);
      if (edges.empty() || mid - edges.back() > map.resolution()) edges.push_back(mid);
    }
  }

  const bool danger = std::any_of(edges.begin(), edges.end(), [&](double e) {
    return e >= 0.0 && e <= params.min_edge_distance;
  });
  if (!danger) return {target, false, false};

  // Slide back inside the flat run containing the target: bounded ahead by
  // the offending edge, behind by the previous edge or the window start.
  double ahead = s_at.back();
  double behind = s_at.front();
  for (double e : edges) {
    if (e >= 0.0) {
      ahead = std::min(ahead, e);
    } else {
      behind = std::max(behind, e);
    }
  }
  const double lo = behind + params.min_edge_distance;
  const double hi = ahead - params.min_edge_distance;
  CorrectedStep out{target, true, false};
  double new_s;
  if (lo > hi) {
    new_s = 0.5 * (behind + ahead);  // no fully safe spot: take the run center
    out.fallback = true;
  } else {
    new_s = std::clamp(0.5 * (behind + ahead), lo, hi);
  }
  out.target.head<2>() = target.head<2>() + new_s * dir;
  out.target.z() = map.height_at(out.target.head<2>());
  return out;
}

ReflexDecision trigger_step_reflex(const Vec3& impact_force_world,
                                   const SwingPlan& plan, double t_bar,
                                   const GaitParams& params) {
  ReflexDecision out;
  const Vec3 f = plan.world_from_swing.transpose() * impact_force_world;
  const double norm = f.norm();
  if (norm < params.touchdown_force) return out;
  // Frontal cone: force opposing the swing X direction.
  const double cos_angle = -f.x() / norm;
  if (cos_angle < std::cos(params.reflex_cone_half_angle)) return out;

  if (t_bar < plan.apex_time) {
    out.action = ReflexDecision::Action::trigger;
    out.retract_time = plan.duration - t_bar;
    const double r_x = eval_quintic(plan.x, t_bar).position;
    out.angle = std::atan2(params.reflex_retract_height, std::max(r_x, 0.0));
  } else {
    out.action = ReflexDecision::Action::missed;
  }
  return out;
}

SwingPlan plan_reflex_retraction(const SwingPlan& plan, double t_bar,
                                 double retract_height) {
  if (t_bar < 0 || t_bar >= plan.duration) {
    throw std::invalid_argument("reflex time must fall inside the swing");
  }
  const double t_left = plan.duration - t_bar;
  const QuinticSample sx = eval_quintic(plan.x, t_bar);
  const QuinticSample sy = eval_quintic(plan.y, t_bar);
  const QuinticSample sz = t_bar < plan.apex_time
                               ? eval_quintic(plan.z_up, t_bar)
                               : eval_quintic(plan.z_down, t_bar - plan.z_down.start_time);

  SwingPlan out;
  out.world_from_swing = plan.world_from_swing;
  out.liftoff = plan.liftoff;
  out.duration = t_left;
  out.apex_time = t_left;

  BoundaryConditions bc;
  bc.p0 = sx.position;
  bc.v0 = sx.velocity;
  bc.a0 = sx.acceleration;
  bc.pf = 0.0;  // back over the liftoff point
  out.x = solve_quintic(bc, t_left);
  bc.p0 = sy.position;
  bc.v0 = sy.velocity;
  bc.a0 = sy.acceleration;
  bc.pf = sy.position;
  out.y = solve_quintic(bc, t_left);
  bc.p0 = sz.position;
  bc.v0 = sz.velocity;
  bc.a0 = sz.acceleration;
  bc.pf = sz.position + retract_height;
  out.z_up = solve_quintic(bc, t_left);
  // Degenerate descent: hold the retracted point (evaluated only at t ==
  // duration, where it matches the ascent's endpoint).
  BoundaryConditions hold;
  hold.p0 = hold.pf = bc.pf;
  out.z_down = solve_quintic(hold, 1.0);
  out.z_down.start_time = t_left;
  return out;
}

std::array<LegId, 4> stair_resequence(const std::array<LegId, 4>& sequence,
                                      const std::array<Vec3, 4>& feet_by_leg,
                                      LegId last_swung, double tolerance) {
  int idx = -1;
  for (int i = 0; i < 4; ++i) {
    if (sequence[i] == last_swung) idx = i;
  }
  if (idx < 0) throw std::invalid_argument("last swung leg not in the sequence");

  LegId next = sequence[(idx + 1) % 4];
  const LegId partner = pair_of(last_swung);
  const double dz = feet_by_leg[static_cast<int>(partner)].z() -
                    feet_by_leg[static_cast<int>(last_swung)].z();
  if (std::abs(dz) > tolerance) next = partner;

  std::array<LegId, 4> out;
  int start = 0;
  for (int i = 0; i < 4; ++i) {
    if (sequence[i] == next) start = i;
  }
  for (int i = 0; i < 4; ++i) out[i] = sequence[(start + i) % 4];
  return out;
}

}  // namespace crawl
