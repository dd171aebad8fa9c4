#pragma once

#include <array>
#include <optional>

#include "crawl/geometry.hpp"
#include "crawl/height_map.hpp"
#include "crawl/quintic.hpp"

namespace crawl {

enum class LegId { LF = 0, RF = 1, LH = 2, RH = 3 };
constexpr std::array<LegId, 4> kAllLegs = {LegId::LF, LegId::RF, LegId::LH, LegId::RH};
const char* leg_name(LegId leg);
bool is_front(LegId leg);
bool is_left(LegId leg);
/// Same-girdle partner (LF<->RF, LH<->RH).
LegId pair_of(LegId leg);

/// User locomotion command: planar velocity [m/s] and heading rate [rad/s].
struct StepCommand {
  Vec2 velocity = Vec2::Zero();
  double yaw_rate = 0;
};

/// Omnidirectional crawl step sequence (cyclic).
constexpr std::array<LegId, 4> kDefaultSequence = {LegId::RH, LegId::RF, LegId::LH,
                                                   LegId::LF};

struct GaitParams {
  Vec3 step_max{0.20, 0.10, 0.35};   // max step: x, y [m], heading [rad]
  Vec3 step_tr{0.10, 0.05, 0.20};    // step at the transition velocity
  Vec3 command_cap{1.5, 0.5, 2.0};   // rejection caps: vx, vy [m/s], yaw [rad/s]
  double velocity_tr = 0.10;         // transition velocity [m/s]
  double duty_factor = 0.75;         // move-body share of the post-load cycle
  double t_load_unload = 0.10;       // total load+unload time per cycle [s]
  double default_cycle = 0.80;       // cycle time when the command is zero [s]
  double step_height = 0.06;         // default swing apex height [m]
  double apex_ratio = 0.5;           // default apex position along the swing
  Vec2 stance_offset{0.0, 0.0};      // lateral/longitudinal stance widening [m]
  double com_margin = 0.05;          // stability margin d [m]
  double search_rate = 0.15;         // searching-motion speed [m/s]
  double search_limit = 0.25;        // workspace budget for the search [m]
  double touchdown_force = 20.0;     // haptic threshold [N]
  int touchdown_ticks = 3;           // debounce
  double clearance_margin = 0.03;    // added above the worst asperity [m]
  int clearance_samples = 20;        // discretization N
  double reflex_cone_half_angle = M_PI / 6.0;
  double reflex_retract_height = 0.10;  // r_z [m]
  double stair_tolerance = 0.07;        // |dz| above which a pair is split [m]
  double edge_threshold = 0.05;         // height jump treated as an edge [m]
  double min_edge_distance = 0.08;      // keep-out around edges [m]
  double correction_window = 0.24;      // conservative-correction scan [m]

  void validate() const;  // throws std::invalid_argument with the field name

  bool operator==(const GaitParams& o) const {
    return step_max.cwiseEqual(o.step_max).all() &&
           step_tr.cwiseEqual(o.step_tr).all() &&
           command_cap.cwiseEqual(o.command_cap).all() &&
           velocity_tr == o.velocity_tr && duty_factor == o.duty_factor &&
           t_load_unload == o.t_load_unload && default_cycle == o.default_cycle &&
           step_height == o.step_height && apex_ratio == o.apex_ratio &&
           stance_offset.cwiseEqual(o.stance_offset).all() &&
           com_margin == o.com_margin && search_rate == o.search_rate &&
           search_limit == o.search_limit && touchdown_force == o.touchdown_force &&
           touchdown_ticks == o.touchdown_ticks &&
           clearance_margin == o.clearance_margin &&
           clearance_samples == o.clearance_samples &&
           reflex_cone_half_angle == o.reflex_cone_half_angle &&
           reflex_retract_height == o.reflex_retract_height &&
           stair_tolerance == o.stair_tolerance &&
           edge_threshold == o.edge_threshold &&
           min_edge_distance == o.min_edge_distance &&
           correction_window == o.correction_window;
  }
};

/// Velocity-mapped default step and cycle timing (heuristic stepping).
struct DefaultStep {
  Vec2 step_xy = Vec2::Zero();  // horizontal-frame step lengths
  double step_heading = 0;      // heading step [rad]
  double t_cycle = 0;
  double t_swing = 0;
  double t_move_body = 0;
};
DefaultStep default_step(const StepCommand& cmd, const GaitParams& params);

/// Planar foot displacement equivalent to rotating the stance by
/// `heading_step` about the vertical: XY of ([0,0,dH] x hip).
Vec2 heading_to_planar(double heading_step, const Vec3& hip_in_base);

/// Re-center the step about the current foot: default step plus the
/// hip-minus-foot drift and the stance offset (all in the same frame).
Vec2 step_about_foot(const Vec2& default_step_xy, const Vec3& hip,
                     const Vec3& foot, const Vec2& stance_offset);

/// Swing trajectory in a dedicated swing frame: quintic XY from 0 to the
/// planned displacement, Z chained through the apex (height, ratio) down to
/// z_end. Evaluation clamps outside [0, duration].
struct SwingPlan {
  Mat3 world_from_swing = Mat3::Identity();
  Vec3 liftoff = Vec3::Zero();  // world
  double duration = 0;
  double apex_time = 0;
  QuinticSegment x, y, z_up, z_down;

  Vec3 position(double t) const;   // world
  Vec3 velocity(double t) const;   // world
  Vec3 target() const;             // world touchdown target
};

SwingPlan plan_swing(const Vec3& liftoff_world, const Mat3& world_from_swing,
                     const Vec2& displacement_xy, double step_height,
                     double apex_ratio, double t_swing, double z_end = 0.0);

/// Re-time an in-flight swing to `new_duration`, keeping the apex ratio of
/// the plan. No-op (returns the input) when the swing already passed
/// new_duration.
SwingPlan reschedule_swing(const SwingPlan& plan, double t_now, double new_duration);

/// Searching motion: once the nominal swing ends without contact, the foot
/// keeps moving linearly along -terrain_normal at `rate`. `elapsed` counts
/// from the end of the swing.
Vec3 search_position(const SwingPlan& plan, const Vec3& terrain_normal, double rate,
                     double elapsed);

/// Height-map Z correction of a planner target. Returns the corrected point
/// and whether the map covered it (falls back to the input Z otherwise).
struct VisionTarget {
  Vec3 point;
  bool corrected;
};
VisionTarget vision_correct_target(const HeightMap& map, const Vec3& target);

/// Swing frame for a vision-corrected step: Z = (target - foot) x base_y,
/// Y = Z x e_x, X completes. Optionally re-aligns a reference normal into the
/// plane (Z replaced by the in-plane component of `terrain_normal`).
/// Throws when the foot->target segment is parallel to the base Y axis.
Mat3 compute_swing_frame(const Vec3& foot, const Vec3& target,
                         const Mat3& world_from_base,
                         const Vec3* terrain_normal = nullptr);

/// Max-asperity clearance along the foot->target segment: N+1 samples of the
/// height map against the straight segment, deficits projected orthogonally
/// to the segment. Returns the raised apex height/ratio (defaults when the
/// terrain never rises above the segment).
struct ClearanceResult {
  double step_height;
  double apex_ratio;
};
ClearanceResult optimize_clearance(const HeightMap& map, const Vec3& foot,
                                   const Vec3& target, const GaitParams& params);

/// Conservative foothold correction for stair-like terrain: scan the height
/// map from the target along the motion direction; if an edge (height jump
/// above edge_threshold, ascending or descending toward the target) lies
/// within min_edge_distance ahead, slide the target backward along the
/// motion direction to the nearest point keeping min_edge_distance from all
/// edges inside the scan window. Z re-queried from the map.
struct CorrectedStep {
  Vec3 target;
  bool corrected;
  bool fallback = false;  // no flat region wide enough inside the window
};
CorrectedStep conservative_step_correction(const HeightMap& map, const Vec3& target,
                                           const Vec2& motion_dir,
                                           const GaitParams& params);

/// Step-reflex decision for a frontal impact measured at swing time t_bar.
struct ReflexDecision {
  enum class Action { none, trigger, missed } action = Action::none;
  double retract_time = 0;  // remaining swing time for the retraction
  double angle = 0;         // impact elevation angle in the swing sagittal plane
};
ReflexDecision trigger_step_reflex(const Vec3& impact_force_world,
                                   const SwingPlan& plan, double t_bar,
                                   const GaitParams& params);

/// Retraction trajectory replacing a stumbling swing: back along swing X by
/// the covered distance and up by retract_height, over the remaining time.
SwingPlan plan_reflex_retraction(const SwingPlan& plan, double t_bar,
                                 double retract_height);

/// Stair-mode gait resequencing: when the pair partner of the last-swung leg
/// sits on a different step (|dz| > tolerance), rotate the cyclic sequence so
/// the partner swings next; otherwise advance normally. Returns the upcoming
/// sequence starting at the next leg to swing.
std::array<LegId, 4> stair_resequence(const std::array<LegId, 4>& sequence,
                                      const std::array<Vec3, 4>& feet_by_leg,
                                      LegId last_swung, double tolerance);

}  // namespace crawl
