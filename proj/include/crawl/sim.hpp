#pragma once

#include <string>
#include <vector>

#include "crawl/scenario.hpp"
#include "crawl/step_planner.hpp"

namespace crawl {

enum class Phase { move_body, unload, swing, search, load };
const char* phase_name(Phase phase);

struct SimEvent {
  double t = 0;
  std::string kind;  // touchdown, step_reflex, missed_reflex, height_reflex, ...
  LegId leg = LegId::LF;
  double value = 0;
};

/// One logged control tick.
struct TickRecord {
  double t = 0;
  Phase phase = Phase::move_body;
  LegId leg = LegId::LF;              // active (swing-side) leg of the segment
  Vec3 com = Vec3::Zero();            // actual CoM (tracks the plan)
  Vec3 com_velocity = Vec3::Zero();   // measured (momentum-derived)
  Vec3 rpy = Vec3::Zero();
  std::array<Vec3, 4> feet{};         // actual foot positions, world
  std::array<bool, 4> contact{};
  std::array<Vec3, 4> grf_desired{};
  std::array<Vec3, 4> grf_realized{};
  Vec3 terrain_normal = Vec3::UnitZ();
  double terrain_roll = 0, terrain_pitch = 0, terrain_fit_error = 0;
  Vec3 force_estimate = Vec3::Zero();   // fhat
  Vec3 torque_estimate = Vec3::Zero();  // tauhat
  Vec2 com_shift = Vec2::Zero();        // dxcom (ZMP compensation offset)
  bool divergence = false;
  Vec6 injected = Vec6::Zero();         // truth disturbance wrench at the CoM
  Vec2 zmp = Vec2::Zero();
  double margin = 0;      // in-plane ZMP margin to the active support polygon
  double margin_com = 0;  // same for the CoM ground projection
  double grf_error = 0;   // norm of stacked desired-minus-realized foot forces
  std::string events;     // pipe-joined "kind:leg" tags fired this tick
};

struct RunSummary {
  std::string schema = "crawl-summary v1";
  double duration = 0;
  size_t ticks = 0;
  double distance_xy = 0;
  double min_margin = 0;           // over swing/search ticks
  size_t margin_violations = 0;    // swing/search ticks below margin d - 1e-6
  Vec3 grf_rms = Vec3::Zero();     // per-axis total-wrench force tracking RMS
  double grf_error_rms = 0;
  size_t touchdowns = 0;
  size_t touchdowns_search = 0;    // subset declared during searching motion
  size_t step_reflexes = 0;
  size_t missed_reflexes = 0;
  size_t height_reflexes = 0;
  size_t stumbles = 0;
  size_t kinematic_errors = 0;
  size_t resequences = 0;
  bool divergence = false;
  bool halted = false;
  std::string halt_reason;
  Vec3 final_com = Vec3::Zero();
  double bookkeeping_residual = 0;  // max |dh/dt - sum of wrenches| seen
  double foot_ref_drift = 0;        // max stance-reference drift per phase
};

struct SimLog {
  std::vector<TickRecord> ticks;
  std::vector<SimEvent> events;
  RunSummary summary;
};

/// Debounced haptic touchdown detection: true once the measured normal force
/// stayed at or above `threshold` for `debounce` consecutive updates.
struct TouchdownDetector {
  int streak = 0;
  bool update(double normal_force, double threshold, int debounce);
};

/// Weighted minimum-norm distribution of a CoM wrench onto point contacts:
/// f = D G^T (G D G^T)^-1 w with D = diag(weights). Throws
/// std::invalid_argument for fewer than three contacts or a weight-count
/// mismatch, std::domain_error when the stance cannot realize the wrench.
std::vector<Vec3> distribute_grf(const std::vector<Vec3>& positions, const Vec3& com,
                                 const Vec6& wrench, std::vector<double> weights = {});

/// Trunk height after a height reflex: lowered by the searching-motion
/// overrun, capped at max_drop; non-positive overrun leaves it unchanged.
double height_reflex_target(double search_overrun, double height_target,
                            double max_drop);

/// Deterministic quasi-static rollout of the crawl controller over the
/// scenario terrain. Configuration errors raise ConfigError; runtime halts
/// (e.g. search budget exhausted with the height reflex disabled) are
/// reported via summary.halted, not exceptions.
SimLog run_scenario(const ScenarioConfig& config);

}  // namespace crawl
