#include "crawl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crawl/body_planner.hpp"
#include "crawl/rng.hpp"
#include "crawl/terrain_estimator.hpp"
#include "crawl/wrench_observer.hpp"

namespace crawl {

namespace {

constexpr double kContactStiffness = 2.0e4;  // N/m, penetration force emulation
constexpr double kImpactForce = 30.0;        // N, emulated frontal-impact magnitude
constexpr double kWallRise = 0.02;           // m, penetration jump treated as a wall
constexpr double kMaxHeightDrop = 0.10;      // m, trunk drop per height reflex
constexpr double kZmpClampMargin = 0.005;    // m, shifted targets stay inside by this

/// Diagonal partner across the body (LF<->RH, RF<->LH).
LegId diagonal_of(LegId leg) {
  switch (leg) {
    case LegId::LF: return LegId::RH;
    case LegId::RF: return LegId::LH;
    case LegId::LH: return LegId::RF;
    case LegId::RH: return LegId::LF;
  }
  return leg;
}

int idx(LegId leg) { return static_cast<int>(leg); }

std::array<Vec3, 4> zero4() {
  std::array<Vec3, 4> a;
  a.fill(Vec3::Zero());
  return a;
}

/// Signed in-plane stability margin of a world XY point against the stance
/// polygon, measured the way the body planner places the CoM: the point and
/// the edge midpoints pierce the estimated plane vertically (gravity lines),
/// while edge directions project onto the plane orthogonally.
double inplane_margin(const Vec2& point_xy, const std::vector<Vec3>& stance,
                      const Vec3& normal, const Vec3& plane_point) {
  const Vec3 n = normal.normalized();
  const auto lift = [&](const Vec2& xy) {
    const double z = plane_point.z() - (n.x() * (xy.x() - plane_point.x()) +
                                        n.y() * (xy.y() - plane_point.y())) /
                                           n.z();
    return Vec3(xy.x(), xy.y(), z);
  };

  std::vector<Vec3> poly(stance);
  Vec2 centroid = Vec2::Zero();
  for (const Vec3& foot : poly) centroid += foot.head<2>();
  centroid /= static_cast<double>(poly.size());
  std::sort(poly.begin(), poly.end(), [&](const Vec3& a, const Vec3& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
           std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });

  const Vec3 point = lift(point_xy);
  const Vec3 interior = lift(centroid);
  double margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % poly.size()];
    Vec3 u = b - a;
    u -= n * n.dot(u);
    if (u.norm() < 1e-9) continue;
    Vec3 inward = n.cross(u.normalized());
    const Vec3 anchor = lift(0.5 * (a + b).head<2>());
    if (inward.dot(interior - anchor) < 0) inward = -inward;
    margin = std::min(margin, inward.dot(point - anchor));
  }
  return margin;
}

/// ZMP of a contact force set, with lever arms taken about the mean stance
/// height so tilted stances stay consistent with the in-plane margin test.
Vec2 zmp_of(const std::vector<Vec3>& positions, const std::vector<Vec3>& forces,
            const Vec2& fallback) {
  double fz = 0, z0 = 0;
  for (size_t i = 0; i < positions.size(); ++i) {
    fz += forces[i].z();
    z0 += positions[i].z();
  }
  z0 /= static_cast<double>(positions.size());
  if (std::abs(fz) < 1e-6) return fallback;
  Vec2 zmp = Vec2::Zero();
  for (size_t i = 0; i < positions.size(); ++i) {
    const double lever = positions[i].z() - z0;
    zmp.x() += forces[i].z() * positions[i].x() - lever * forces[i].x();
    zmp.y() += forces[i].z() * positions[i].y() - lever * forces[i].y();
  }
  return zmp / fz;
}

class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& config)
      : cfg_(config),
        map_(make_terrain(config.terrain, config.sim.seed)),
        legs_(make_leg_models(config.robot.hip_x, config.robot.hip_y,
                              config.robot.upper_leg, config.robot.lower_leg)),
        dt_(config.sim.dt),
        rng_(config.sim.seed) {
    gains_.linear = cfg_.observer.gain_lin * Mat3::Identity();
    gains_.angular = cfg_.observer.gain_ang * Mat3::Identity();
  }

  SimLog run();

 private:
  // --- configuration-derived state ---
  ScenarioConfig cfg_;
  HeightMap map_;
  std::array<LegModel, 4> legs_;
  double dt_;
  Rng rng_;
  ObserverGains gains_;

  SimLog log_;
  double t_ = 0;

  // plant (tracks the plan exactly; quasi-static)
  Vec3 com_ = Vec3::Zero();
  Vec3 rpy_ = Vec3::Zero();
  std::array<Vec3, 4> feet_ = zero4();
  std::array<bool, 4> contact_{true, true, true, true};
  Vec3 com_v_ = Vec3::Zero(), com_a_ = Vec3::Zero();
  Vec3 omega_ = Vec3::Zero(), alpha_ = Vec3::Zero();

  // gait bookkeeping
  std::array<LegId, 4> sequence_ = kDefaultSequence;
  int seq_pos_ = 0;
  LegId seg_leg_ = kDefaultSequence[0];
  Phase phase_ = Phase::move_body;
  double clock_ = 0;
  DefaultStep timing_;
  StepCommand cmd_at_liftoff_;
  BodyTarget body_;
  SwingPlan swing_;
  bool reflex_fired_ = false;
  bool height_reflex_fired_ = false;
  bool kinematic_flagged_ = false;
  std::array<double, 4> reflex_boost_{};
  TouchdownDetector touchdown_;
  double search_budget_ = 0;
  double height_target_ = 0;
  Vec2 active_shift_ = Vec2::Zero();

  // terrain estimate
  TerrainPlane plane_;
  Vec3 plane_point_ = Vec3::Zero();

  // observer + measured momentum
  ObserverState obs_;
  Vec6 comp_wrench_ = Vec6::Zero();  // estimate in use by the controller
  bool comp_frozen_ = false;
  Vec3 p_meas_ = Vec3::Zero(), k_meas_ = Vec3::Zero();

  // drift metric
  std::array<StanceFootRef, 4> refs_;

  // summary accumulators
  Vec3 grf_sq_ = Vec3::Zero();
  double grf_err_sq_ = 0;
  double min_margin_ = std::numeric_limits<double>::infinity();
  bool halted_ = false;

  std::vector<std::string> tick_events_;

  // --- helpers ---
  Mat3 world_from_base() const { return rpy_to_rotation(rpy_); }
  Vec3 base_pos() const { return com_ - world_from_base() * cfg_.robot.com_offset; }
  double half_lu() const { return std::max(cfg_.gait.t_load_unload * 0.5, dt_); }

  void event(const std::string& kind, LegId leg, double value) {
    log_.events.push_back({t_, kind, leg, value});
    tick_events_.push_back(kind + ":" + leg_name(leg));
    auto& s = log_.summary;
    if (kind == "touchdown") ++s.touchdowns;
    else if (kind == "search_touchdown") ++s.touchdowns_search;
    else if (kind == "step_reflex") ++s.step_reflexes;
    else if (kind == "missed_reflex") ++s.missed_reflexes;
    else if (kind == "height_reflex") ++s.height_reflexes;
    else if (kind == "stumble") ++s.stumbles;
    else if (kind == "resequence") ++s.resequences;
  }

  void halt(const std::string& reason) {
    halted_ = true;
    log_.summary.halted = true;
    log_.summary.halt_reason = reason;
    event("halt", seg_leg_, 0.0);
  }

  StepCommand command_at(double t) const {
    StepCommand cmd;
    for (const ProfileRow& row : cfg_.profile) {
      if (row.t > t) break;
      cmd.velocity = row.velocity;
      cmd.yaw_rate = row.yaw_rate;
    }
    return cmd;
  }

  /// Truth disturbance wrench at the CoM (force world, torque about the CoM).
  Vec6 injected_at(double t) const {
    Vec6 w = Vec6::Zero();
    const Mat3 rot = rpy_to_rotation(rpy_);
    const Vec3 base = com_ - rot * cfg_.robot.com_offset;
    for (const WrenchRow& row : cfg_.wrenches) {
      if (t < row.t_start || t >= row.t_end) continue;
      const Vec3 app = base + rot * row.application;
      w.head<3>() += row.force;
      w.tail<3>() += row.torque + (app - com_).cross(row.force);
    }
    return w;
  }

  double terrain_height(const Vec2& xy) const {
    if (map_.contains(xy)) return map_.height_at(xy);
    return plane_z(xy);
  }

  double plane_z(const Vec2& xy) const {
    const Vec3& n = plane_.normal;
    return plane_point_.z() - (n.x() * (xy.x() - plane_point_.x()) +
                               n.y() * (xy.y() - plane_point_.y())) /
                                  n.z();
  }

  void fit_plane() {
    const FootSet fs{{feet_[idx(LegId::LF)], feet_[idx(LegId::LH)],
                      feet_[idx(LegId::RH)], feet_[idx(LegId::RF)]}};
    try {
      plane_ = cfg_.features.smart_terrain
                   ? smart_correct(fs, plane_, SmartCorrectionParams{})
                   : vertical_fit(fs);
      plane_.timestamp = t_;
      plane_point_ = 0.25 * (feet_[0] + feet_[1] + feet_[2] + feet_[3]);
    } catch (const std::exception&) {
      event("fit_degenerate", seg_leg_, plane_.fit_error);
    }
  }

  void init();
  void start_segment();
  void liftoff();
  void handle_touchdown(double normal_force);
  void advance_phase();
  void update_desired();
  void emulate_contact();
  void force_step();
  void check_kinematics();
  void record_tick(const std::array<Vec3, 4>& grf_d, const std::array<Vec3, 4>& grf_r,
                   const Vec6& injected, const Vec2& zmp, double margin,
                   double margin_com, double grf_error);
};

void Simulator::init() {
  com_ = Vec3::Zero();
  rpy_ = Vec3::Zero();
  height_target_ = cfg_.robot.height;
  double z_sum = 0;
  for (LegId leg : kAllLegs) {
    const Vec3 hip = legs_[idx(leg)].hip;
    const Vec2 xy(hip.x(), hip.y());
    const double z = map_.contains(xy) ? map_.height_at(xy) : 0.0;
    feet_[idx(leg)] = Vec3(xy.x(), xy.y(), z);
    z_sum += z;
  }
  com_.z() = z_sum / 4.0 + height_target_;
  plane_point_ = Vec3(0, 0, z_sum / 4.0);
  fit_plane();
  start_segment();
}

void Simulator::start_segment() {
  phase_ = Phase::move_body;
  clock_ = 0;
  seg_leg_ = sequence_[seq_pos_];
  kinematic_flagged_ = false;
  timing_ = default_step(command_at(t_), cfg_.gait);

  // future support triangle: the three feet that stay planted
  const LegId third = diagonal_of(seg_leg_);
  std::array<LegId, 2> diag{};
  int n = 0;
  for (LegId leg : kAllLegs) {
    if (leg != seg_leg_ && leg != third) diag[n++] = leg;
  }
  Vec3 target = com_target(feet_[idx(diag[0])], feet_[idx(diag[1])], feet_[idx(third)],
                           cfg_.gait.com_margin, height_target_, plane_.normal);

  Vec2 shift = Vec2::Zero();
  if (cfg_.observer.enabled && cfg_.observer.zmp_correction) {
    try {
      shift = zmp_shift(comp_wrench_, cfg_.robot.mass, height_target_);
    } catch (const std::domain_error&) {
      shift.setZero();
    }
    const std::vector<Vec3> tri{feet_[idx(diag[0])], feet_[idx(diag[1])],
                                feet_[idx(third)]};
    double scale = 1.0;
    while (scale > 1e-3 &&
           inplane_margin(target.head<2>() + scale * shift, tri, plane_.normal,
                          plane_point_) < kZmpClampMargin) {
      scale *= 0.5;
    }
    shift *= scale > 1e-3 ? scale : 0.0;
    target.head<2>() += shift;
  }
  active_shift_ = shift;

  try {
    const Vec3 rpy_target = orientation_target(plane_, feet_);
    body_ = plan_body_motion(com_, rpy_, target, rpy_target, timing_.t_move_body);
  } catch (const std::exception& err) {
    halt(std::string("planning failed: ") + err.what());
    return;
  }
  const Mat3 rot = world_from_base();
  for (int i = 0; i < 4; ++i) {
    refs_[i].reset(rot.transpose() * (feet_[i] - com_));
  }
}

void Simulator::liftoff() {
  phase_ = Phase::swing;
  clock_ = 0;
  reflex_fired_ = false;
  height_reflex_fired_ = false;
  touchdown_ = TouchdownDetector{};
  contact_[idx(seg_leg_)] = false;
  event("liftoff", seg_leg_, 0.0);

  const StepCommand cmd = command_at(t_);
  cmd_at_liftoff_ = cmd;
  timing_ = default_step(cmd, cfg_.gait);
  const LegModel& model = legs_[idx(seg_leg_)];
  const Mat3 rot = world_from_base();
  const Mat3 world_from_h = rot_z(rpy_.z());
  const Vec3 foot = feet_[idx(seg_leg_)];

  // default step about the hip, re-centered about the foot (horizontal frame)
  Vec2 step = timing_.step_xy + heading_to_planar(timing_.step_heading, model.hip);
  const Vec3 hip_h = world_from_h.transpose() * (base_pos() + rot * model.hip - com_);
  const Vec3 foot_h = world_from_h.transpose() * (foot - com_);
  const Vec2 offset(cfg_.gait.stance_offset.x() * (is_front(seg_leg_) ? 1.0 : -1.0),
                    cfg_.gait.stance_offset.y() * (is_left(seg_leg_) ? 1.0 : -1.0));
  step = step_about_foot(step, hip_h, foot_h, offset);

  const Vec3 disp_w = world_from_h * Vec3(step.x(), step.y(), 0.0);
  Vec3 target = foot + disp_w;
  target.z() = plane_z(target.head<2>());

  Mat3 world_from_swing;
  try {
    world_from_swing = build_terrain_frame(plane_.normal, rot);
  } catch (const std::exception&) {
    world_from_swing = Mat3::Identity();
  }

  const bool use_map = cfg_.features.vision_stepping || cfg_.features.stair_mode;
  if (use_map) {
    const VisionTarget vt = vision_correct_target(map_, target);
    target = vt.point;
    if (cfg_.features.stair_mode && disp_w.head<2>().norm() > 1e-6) {
      const CorrectedStep cs = conservative_step_correction(
          map_, target, disp_w.head<2>().normalized(), cfg_.gait);
      target = cs.target;
      if (cs.corrected) event("step_corrected", seg_leg_, 0.0);
    }
    if (vt.corrected) {
      try {
        world_from_swing = compute_swing_frame(foot, target, rot, &plane_.normal);
      } catch (const std::exception&) {
        // fall back to the terrain frame for degenerate segments
      }
    }
  }

  double step_height = cfg_.gait.step_height;
  double apex_ratio = cfg_.gait.apex_ratio;
  if (cfg_.features.clearance_opt || cfg_.features.stair_mode) {
    try {
      const ClearanceResult cr = optimize_clearance(map_, foot, target, cfg_.gait);
      step_height = cr.step_height;
      apex_ratio = cr.apex_ratio;
    } catch (const std::exception&) {
      // target outside the map: keep the defaults
    }
  }
  if (reflex_boost_[idx(seg_leg_)] > 0) {
    step_height += reflex_boost_[idx(seg_leg_)];
    reflex_boost_[idx(seg_leg_)] = 0;
    event("reflex_boost", seg_leg_, step_height);
  }

  const Vec3 d_swing = world_from_swing.transpose() * (target - foot);
  try {
    swing_ = plan_swing(foot, world_from_swing, d_swing.head<2>(), step_height,
                        apex_ratio, timing_.t_swing, d_swing.z());
  } catch (const std::exception& err) {
    halt(std::string("swing planning failed: ") + err.what());
    return;
  }
  search_budget_ = cfg_.gait.search_limit;
}

void Simulator::handle_touchdown(double normal_force) {
  Vec3& foot = feet_[idx(seg_leg_)];
  foot.z() = terrain_height(foot.head<2>());
  contact_[idx(seg_leg_)] = true;
  event("touchdown", seg_leg_, normal_force);
  if (phase_ == Phase::search) event("search_touchdown", seg_leg_, 0.0);
  fit_plane();

  const LegId natural = sequence_[(seq_pos_ + 1) % 4];
  if (cfg_.features.stair_mode) {
    sequence_ = stair_resequence(sequence_, feet_, seg_leg_, cfg_.gait.stair_tolerance);
    seq_pos_ = 0;
    if (sequence_[0] != natural) event("resequence", sequence_[0], 0.0);
  } else {
    seq_pos_ = (seq_pos_ + 1) % 4;
  }
  phase_ = Phase::load;
  clock_ = 0;
}

void Simulator::advance_phase() {
  switch (phase_) {
    case Phase::move_body:
      if (clock_ >= timing_.t_move_body) {
        com_ = body_.com_at(body_.duration);  // land exactly on the target
        rpy_ = body_.rpy_at(body_.duration);
        phase_ = Phase::unload;
        clock_ = 0;
      }
      break;
    case Phase::unload:
      if (clock_ >= half_lu()) liftoff();
      break;
    case Phase::swing:
      if (clock_ >= swing_.duration) phase_ = Phase::search;  // clock keeps running
      break;
    case Phase::search:
      break;  // exits via touchdown or budget exhaustion
    case Phase::load:
      if (clock_ >= half_lu()) start_segment();
      break;
  }
}

void Simulator::update_desired() {
  com_v_.setZero();
  com_a_.setZero();
  omega_.setZero();
  alpha_.setZero();
  if (phase_ != Phase::move_body) return;

  const double tt = std::min(clock_, body_.duration);
  com_ = body_.com_at(tt);
  rpy_ = body_.rpy_at(tt);
  com_v_ = body_.com_velocity_at(tt);
  com_a_ = body_.com_acceleration_at(tt);
  const Vec3 rates = body_.rpy_rates_at(tt);
  omega_ = euler_rates_to_omega(rpy_, rates);
  const Vec3 rpy_acc(eval_quintic(body_.rpy[0], tt).acceleration,
                     eval_quintic(body_.rpy[1], tt).acceleration,
                     eval_quintic(body_.rpy[2], tt).acceleration);
  alpha_ = euler_rates_to_omega(rpy_, rpy_acc);

  // stance-reference drift metric: integrate the exact rigid-body complement
  // and compare against the world-fixed foot (see the body planner)
  const Mat3 rot = rpy_to_rotation(rpy_);
  const Vec3 v_b = rot.transpose() * com_v_;
  const Vec3 omega_b = rot.transpose() * omega_;
  for (int i = 0; i < 4; ++i) {
    const Vec3 lever = rot.transpose() * (feet_[i] - com_);
    refs_[i].advance(stance_foot_velocity(v_b, omega_b, lever, Vec3::Zero()), dt_);
    const Vec3 world = com_ + rot * refs_[i].position;
    log_.summary.foot_ref_drift =
        std::max(log_.summary.foot_ref_drift, (world - feet_[i]).norm());
  }
}

void Simulator::emulate_contact() {
  if (phase_ != Phase::swing && phase_ != Phase::search) return;

  // mid-swing command change: reschedule the remaining swing time
  if (phase_ == Phase::swing) {
    const StepCommand cmd = command_at(t_);
    if ((cmd.velocity - cmd_at_liftoff_.velocity).norm() > 1e-12 ||
        std::abs(cmd.yaw_rate - cmd_at_liftoff_.yaw_rate) > 1e-12) {
      cmd_at_liftoff_ = cmd;
      const DefaultStep ds = default_step(cmd, cfg_.gait);
      const SwingPlan next = reschedule_swing(swing_, clock_, ds.t_swing);
      if (next.duration != swing_.duration) {
        swing_ = next;
        event("reschedule", seg_leg_, ds.t_swing);
      }
    }
  }

  Vec3 desired, velocity;
  if (phase_ == Phase::swing) {
    desired = swing_.position(clock_);
    velocity = swing_.velocity(clock_);
  } else {
    const double elapsed = clock_ - swing_.duration;
    desired = search_position(swing_, plane_.normal, cfg_.gait.search_rate, elapsed);
    velocity = -cfg_.gait.search_rate * plane_.normal;
    if (elapsed * cfg_.gait.search_rate >= search_budget_) {
      const double gap = desired.z() - terrain_height(desired.head<2>());
      event("workspace_limit", seg_leg_, gap);
      if (cfg_.features.height_reflex && !height_reflex_fired_) {
        height_reflex_fired_ = true;
        const double lowered =
            height_reflex_target(gap, height_target_, kMaxHeightDrop);
        const double drop = height_target_ - lowered;
        height_target_ = lowered;
        event("height_reflex", seg_leg_, drop);
        if (height_target_ < cfg_.robot.min_height) {
          halt("trunk height below minimum");
          return;
        }
        if (drop <= 1e-9) {
          halt("search budget exhausted");
          return;
        }
        search_budget_ += drop;
      } else {
        halt("search budget exhausted");
        return;
      }
    }
  }

  const double ground = terrain_height(desired.head<2>());
  const double penetration = ground - desired.z();

  // frontal wall hit: the desired path dives into terrain within one tick
  if (phase_ == Phase::swing && !reflex_fired_ && penetration > kWallRise &&
      cfg_.features.step_reflex) {
    const Vec2 horiz(velocity.x(), velocity.y());
    if (horiz.norm() > 1e-6) {
      const Vec3 impact(-kImpactForce * horiz.x() / horiz.norm(),
                        -kImpactForce * horiz.y() / horiz.norm(), 0.0);
      const ReflexDecision dec = trigger_step_reflex(impact, swing_, clock_, cfg_.gait);
      if (dec.action == ReflexDecision::Action::trigger) {
        reflex_fired_ = true;
        event("stumble", seg_leg_, penetration);
        event("step_reflex", seg_leg_, dec.angle);
        swing_ =
            plan_reflex_retraction(swing_, clock_, cfg_.gait.reflex_retract_height);
        touchdown_ = TouchdownDetector{};
        feet_[idx(seg_leg_)] = swing_.position(clock_);
        return;
      }
      if (dec.action == ReflexDecision::Action::missed) {
        reflex_fired_ = true;
        event("stumble", seg_leg_, penetration);
        event("missed_reflex", seg_leg_, clock_);
        reflex_boost_[idx(seg_leg_)] = cfg_.gait.reflex_retract_height;
      }
    }
  }

  Vec3 actual = desired;
  double normal_force = 0;
  if (penetration > 0) {
    actual.z() = ground;
    normal_force =
        std::min(kContactStiffness * penetration, 3.0 * cfg_.robot.mass * kGravity);
  }
  feet_[idx(seg_leg_)] = actual;
  if (touchdown_.update(normal_force, cfg_.gait.touchdown_force,
                        cfg_.gait.touchdown_ticks)) {
    handle_touchdown(normal_force);
  }
}

void Simulator::check_kinematics() {
  const Mat3 rot = world_from_base();
  const Vec3 base = base_pos();
  for (LegId leg : kAllLegs) {
    try {
      leg_ik(legs_[idx(leg)], rot.transpose() * (feet_[idx(leg)] - base));
    } catch (const std::exception&) {
      ++log_.summary.kinematic_errors;
      if (!kinematic_flagged_) {
        kinematic_flagged_ = true;
        event("kinematic_limit", leg, 0.0);
      }
    }
  }
}

void Simulator::force_step() {
  const double mass = cfg_.robot.mass;
  const Vec3 gravity(0, 0, -kGravity);
  const Mat3 rot = world_from_base();
  const Mat3 inertia_w = rot * cfg_.robot.inertia_diag.asDiagonal() * rot.transpose();

  Vec6 vm;
  vm.head<3>() = mass * com_a_;
  vm.tail<3>() = inertia_w * alpha_ + omega_.cross(inertia_w * omega_);
  Vec6 grav_w = Vec6::Zero();
  grav_w.head<3>() = -mass * gravity;

  const Vec6 injected = injected_at(t_);
  const bool comp_on = cfg_.observer.enabled && cfg_.observer.compensation;
  const Vec6 w_desired =
      comp_on ? compensate_wrench(vm, grav_w, comp_wrench_) : Vec6(vm + grav_w);
  const Vec6 w_realized = vm + grav_w - injected;

  // stance set + load/unload weights
  std::vector<Vec3> positions;
  std::vector<double> weights;
  std::vector<int> stance_legs;
  for (LegId leg : kAllLegs) {
    if (!contact_[idx(leg)]) continue;
    positions.push_back(feet_[idx(leg)]);
    stance_legs.push_back(idx(leg));
    double w = 1.0;
    if (idx(leg) == idx(seg_leg_)) {
      if (phase_ == Phase::unload) {
        w = std::clamp(1.0 - clock_ / half_lu(), 0.0, 1.0);
      } else if (phase_ == Phase::load) {
        w = std::clamp(clock_ / half_lu(), 0.0, 1.0);
      }
    }
    weights.push_back(w);
  }

  std::array<Vec3, 4> grf_d = zero4(), grf_r = zero4();
  std::vector<Vec3> f_d, f_r;
  try {
    f_d = distribute_grf(positions, com_, w_desired, weights);
    f_r = distribute_grf(positions, com_, w_realized, weights);
  } catch (const std::exception& err) {
    halt(std::string("force distribution failed: ") + err.what());
    record_tick(grf_d, grf_r, injected, com_.head<2>(), 0, 0, 0);
    return;
  }

  Vec3 sum_f = Vec3::Zero(), sum_tau = Vec3::Zero();
  double grf_error_sq = 0;
  for (size_t i = 0; i < positions.size(); ++i) {
    grf_d[stance_legs[i]] = f_d[i];
    grf_r[stance_legs[i]] = f_r[i];
    sum_f += f_r[i];
    sum_tau += (positions[i] - com_).cross(f_r[i]);
    grf_error_sq += (f_d[i] - f_r[i]).squaredNorm();
  }
  const double residual =
      std::max((sum_f - w_realized.head<3>()).cwiseAbs().maxCoeff(),
               (sum_tau - w_realized.tail<3>()).cwiseAbs().maxCoeff());
  log_.summary.bookkeeping_residual =
      std::max(log_.summary.bookkeeping_residual, residual);

  const Vec3 force_diff = w_desired.head<3>() - w_realized.head<3>();
  grf_sq_ += force_diff.cwiseProduct(force_diff);
  grf_err_sq_ += grf_error_sq;

  // measured momentum: ground truth feeding the observer
  Vec3 noise = Vec3::Zero();
  if (cfg_.observer.noise_sigma > 0) {
    noise =
        cfg_.observer.noise_sigma * Vec3(rng_.normal(), rng_.normal(), rng_.normal());
  }
  p_meas_ += dt_ * (sum_f + mass * gravity + injected.head<3>() + noise);
  k_meas_ += dt_ * (sum_tau + injected.tail<3>());

  if (cfg_.observer.enabled) {
    CentroidalState state;
    state.mass = mass;
    state.gravity = gravity;
    state.inertia = inertia_w;
    state.com_position = com_;
    state.com_velocity = p_meas_ / mass;
    state.omega = inertia_w.ldlt().solve(k_meas_);
    for (size_t i = 0; i < positions.size(); ++i) {
      state.contacts.push_back({positions[i], f_r[i]});
    }
    const bool was_diverged = obs_.diverged;
    obs_ = observer_step(obs_, state, gains_, cfg_.observer.form, dt_);
    if (obs_.diverged && !was_diverged) {
      event("divergence", seg_leg_, 0.0);
      log_.summary.divergence = true;
      comp_frozen_ = true;  // hold the last sane estimate
    }
    if (!comp_frozen_) {
      comp_wrench_.head<3>() = obs_.force;
      comp_wrench_.tail<3>() = obs_.torque;
    }
  }

  // realized ZMP and stability margins
  const Vec2 zmp = zmp_of(positions, f_r, com_.head<2>());
  const double margin = inplane_margin(zmp, positions, plane_.normal, plane_point_);
  const double margin_com =
      inplane_margin(com_.head<2>(), positions, plane_.normal, plane_point_);
  if (phase_ == Phase::swing || phase_ == Phase::search) {
    min_margin_ = std::min(min_margin_, margin);
    if (margin < cfg_.gait.com_margin - 1e-6) ++log_.summary.margin_violations;
  }

  record_tick(grf_d, grf_r, injected, zmp, margin, margin_com,
              std::sqrt(grf_error_sq));
}

void Simulator::record_tick(const std::array<Vec3, 4>& grf_d,
                            const std::array<Vec3, 4>& grf_r, const Vec6& injected,
                            const Vec2& zmp, double margin, double margin_com,
                            double grf_error) {
  TickRecord rec;
  rec.t = t_;
  rec.phase = phase_;
  rec.leg = seg_leg_;
  rec.com = com_;
  rec.com_velocity = p_meas_ / cfg_.robot.mass;
  rec.rpy = rpy_;
  rec.feet = feet_;
  rec.contact = contact_;
  rec.grf_desired = grf_d;
  rec.grf_realized = grf_r;
  rec.terrain_normal = plane_.normal;
  rec.terrain_roll = plane_.roll;
  rec.terrain_pitch = plane_.pitch;
  rec.terrain_fit_error = plane_.fit_error;
  rec.force_estimate = obs_.force;
  rec.torque_estimate = obs_.torque;
  rec.com_shift = active_shift_;
  rec.divergence = obs_.diverged;
  rec.injected = injected;
  rec.zmp = zmp;
  rec.margin = margin;
  rec.margin_com = margin_com;
  rec.grf_error = grf_error;
  std::string joined;
  for (size_t i = 0; i < tick_events_.size(); ++i) {
    if (i) joined += "|";
    joined += tick_events_[i];
  }
  rec.events = joined;
  log_.ticks.push_back(std::move(rec));
}

SimLog Simulator::run() {
  init();
  const size_t n_ticks = static_cast<size_t>(std::llround(cfg_.sim.duration / dt_));
  const Vec3 start = com_;
  for (size_t k = 0; k < n_ticks && !halted_; ++k) {
    t_ = static_cast<double>(k) * dt_;
    tick_events_.clear();
    advance_phase();
    if (halted_) {  // start_segment can halt on planning failure
      record_tick(zero4(), zero4(), Vec6::Zero(), com_.head<2>(), 0, 0, 0);
      break;
    }
    update_desired();
    emulate_contact();
    if (halted_) {
      record_tick(zero4(), zero4(), Vec6::Zero(), com_.head<2>(), 0, 0, 0);
      break;
    }
    force_step();
    check_kinematics();
    clock_ += dt_;
  }

  auto& s = log_.summary;
  s.ticks = log_.ticks.size();
  s.duration = static_cast<double>(s.ticks) * dt_;
  s.distance_xy = (com_.head<2>() - start.head<2>()).norm();
  s.min_margin = std::isfinite(min_margin_) ? min_margin_ : 0.0;
  if (!log_.ticks.empty()) {
    const double n = static_cast<double>(log_.ticks.size());
    s.grf_rms = (grf_sq_ / n).cwiseSqrt();
    s.grf_error_rms = std::sqrt(grf_err_sq_ / n);
  }
  s.final_com = com_;
  return log_;
}

}  // namespace

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::move_body: return "move_body";
    case Phase::unload: return "unload";
    case Phase::swing: return "swing";
    case Phase::search: return "search";
    case Phase::load: return "load";
  }
  return "??";
}

bool TouchdownDetector::update(double normal_force, double threshold, int debounce) {
  streak = normal_force >= threshold ? streak + 1 : 0;
  return streak >= debounce;
}

std::vector<Vec3> distribute_grf(const std::vector<Vec3>& positions, const Vec3& com,
                                 const Vec6& wrench, std::vector<double> weights) {
  const int c = static_cast<int>(positions.size());
  if (c < 3) throw std::invalid_argument("GRF distribution needs >= 3 contacts");
  if (weights.empty()) weights.assign(static_cast<size_t>(c), 1.0);
  if (static_cast<int>(weights.size()) != c) {
    throw std::invalid_argument("one weight per contact required");
  }

  Eigen::MatrixXd grasp(6, 3 * c);
  for (int i = 0; i < c; ++i) {
    grasp.block<3, 3>(0, 3 * i) = Mat3::Identity();
    const Vec3 r = positions[static_cast<size_t>(i)] - com;
    Mat3 skew;
    skew << 0, -r.z(), r.y(), r.z(), 0, -r.x(), -r.y(), r.x(), 0;
    grasp.block<3, 3>(3, 3 * i) = skew;
  }
  Eigen::VectorXd d(3 * c);
  for (int i = 0; i < c; ++i) {
    d.segment<3>(3 * i).setConstant(weights[static_cast<size_t>(i)]);
  }

  const Eigen::MatrixXd gd = grasp * d.asDiagonal();
  const Eigen::Matrix<double, 6, 6> gram = gd * grasp.transpose();
  const Eigen::VectorXd f =
      d.asDiagonal() * grasp.transpose() * gram.ldlt().solve(Eigen::VectorXd(wrench));
  const double residual = (grasp * f - wrench).cwiseAbs().maxCoeff();
  if (!(residual < 1e-6 * std::max(1.0, wrench.cwiseAbs().maxCoeff()))) {
    throw std::domain_error("wrench not realizable by the stance contacts");
  }
  std::vector<Vec3> out(static_cast<size_t>(c));
  for (int i = 0; i < c; ++i) out[static_cast<size_t>(i)] = f.segment<3>(3 * i);
  return out;
}

double height_reflex_target(double search_overrun, double height_target,
                            double max_drop) {
  return height_target - std::clamp(search_overrun, 0.0, max_drop);
}

SimLog run_scenario(const ScenarioConfig& config) {
  validate_config(config);
  Simulator sim(config);
  return sim.run();
}

}  // namespace crawl
