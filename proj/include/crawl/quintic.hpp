#pragma once

#include <array>

namespace crawl {

/// Boundary state for one axis of a quintic segment.
struct BoundaryConditions {
  double p0 = 0, v0 = 0, a0 = 0;
  double pf = 0, vf = 0, af = 0;
};

/// Fifth-order polynomial p(t) = c[0] t^5 + c[1] t^4 + ... + c[5], valid on
/// [0, duration]. `start_time` is the epoch the owner assigned to t = 0.
struct QuinticSegment {
  std::array<double, 6> coeff{};  // c[0]=a5 ... c[5]=a0
  double duration = 0;
  double start_time = 0;
};

struct QuinticSample {
  double position = 0;
  double velocity = 0;
  double acceleration = 0;
  bool clamped = false;  // evaluation time fell outside [0, duration]
};

/// Closed-form coefficients meeting the boundary conditions over `duration`.
/// Throws std::invalid_argument for non-positive or non-finite duration.
QuinticSegment solve_quintic(const BoundaryConditions& bc, double duration);

/// Evaluate position/velocity/acceleration at local time t, clamping t into
/// [0, duration] (clamped flag set when that happens).
QuinticSample eval_quintic(const QuinticSegment& seg, double t);

/// Recover the boundary conditions a segment was built from.
BoundaryConditions boundary_conditions(const QuinticSegment& seg);

/// Re-time a segment to `new_duration` while it is being tracked: the new
/// segment keeps the original initial velocity/acceleration and final state,
/// and passes through the original position at local time `t_bar` so the
/// tracked position is continuous at the switch. Throws if t_bar is outside
/// [0, old duration) or new_duration <= t_bar.
QuinticSegment reschedule_quintic(const QuinticSegment& seg, double t_bar,
                                  double new_duration);

}  // namespace crawl
