#include "crawl/quintic.hpp"

#include <cmath>
#include <stdexcept>

namespace crawl {

QuinticSegment solve_quintic(const BoundaryConditions& bc, double duration) {
  if (!std::isfinite(duration) || duration <= 0.0) {
    throw std::invalid_argument("quintic duration must be positive and finite");
  }
  const double T = duration;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;

  const double a0 = bc.p0;
  const double a1 = bc.v0;
  const double a2 = 0.5 * bc.a0;
  const double a3 = (20.0 * (bc.pf - bc.p0) + T * (-12.0 * bc.v0 - 8.0 * bc.vf) +
                     T2 * (-3.0 * bc.a0 + bc.af)) /
                    (2.0 * T3);
  const double a4 = (30.0 * (bc.p0 - bc.pf) + T * (16.0 * bc.v0 + 14.0 * bc.vf) +
                     T2 * (3.0 * bc.a0 - 2.0 * bc.af)) /
                    (2.0 * T4);
  const double a5 = (12.0 * (bc.pf - bc.p0) + T * (-6.0 * bc.v0 - 6.0 * bc.vf) +
                     T2 * (-bc.a0 + bc.af)) /
                    (2.0 * T5);

  QuinticSegment seg;
  seg.coeff = {a5, a4, a3, a2, a1, a0};
  seg.duration = duration;
  return seg;
}

QuinticSample eval_quintic(const QuinticSegment& seg, double t) {
  QuinticSample out;
  if (t < 0.0) {
    t = 0.0;
    out.clamped = true;
  } else if (t > seg.duration) {
    t = seg.duration;
    out.clamped = true;
  }
  const auto& c = seg.coeff;
  out.position = ((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5];
  out.velocity = (((5.0 * c[0] * t + 4.0 * c[1]) * t + 3.0 * c[2]) * t + 2.0 * c[3]) * t + c[4];
  out.acceleration = ((20.0 * c[0] * t + 12.0 * c[1]) * t + 6.0 * c[2]) * t + 2.0 * c[3];
  return out;
}

BoundaryConditions boundary_conditions(const QuinticSegment& seg) {
  BoundaryConditions bc;
  bc.p0 = seg.coeff[5];
  bc.v0 = seg.coeff[4];
  bc.a0 = 2.0 * seg.coeff[3];
  const QuinticSample end = eval_quintic(seg, seg.duration);
  bc.pf = end.position;
  bc.vf = end.velocity;
  bc.af = end.acceleration;
  return bc;
}

QuinticSegment reschedule_quintic(const QuinticSegment& seg, double t_bar,
                                  double new_duration) {
  if (!std::isfinite(t_bar) || t_bar < 0.0 || t_bar >= seg.duration) {
    throw std::invalid_argument("reschedule time must lie in [0, duration)");
  }
  if (!std::isfinite(new_duration) || new_duration <= t_bar) {
    throw std::invalid_argument("new duration must exceed the reschedule time");
  }

  const BoundaryConditions bc = boundary_conditions(seg);
  const double p_bar = eval_quintic(seg, t_bar).position;

  // Keep v0/a0 and the terminal state; solve for the initial position p0'
  // that makes the re-timed polynomial pass through p(t_bar) on the shared
  // time axis. Writing the coefficients as affine functions of p0':
  const double T = new_duration;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  const double b1 =
      (20.0 * bc.pf + T * (-12.0 * bc.v0 - 8.0 * bc.vf) + T2 * (-3.0 * bc.a0 + bc.af)) /
      (2.0 * T3);
  const double b2 =
      (-30.0 * bc.pf + T * (16.0 * bc.v0 + 14.0 * bc.vf) + T2 * (3.0 * bc.a0 - 2.0 * bc.af)) /
      (2.0 * T4);
  const double b3 =
      (12.0 * bc.pf + T * (-6.0 * bc.v0 - 6.0 * bc.vf) + T2 * (-bc.a0 + bc.af)) /
      (2.0 * T5);
  const double s = t_bar / T;
  const double s3 = s * s * s;
  const double b4 = 1.0 - 10.0 * s3 + 15.0 * s3 * s - 6.0 * s3 * s * s;

  const double t2 = t_bar * t_bar, t3 = t2 * t_bar, t4 = t3 * t_bar, t5 = t4 * t_bar;
  const double p0 = (p_bar - bc.v0 * t_bar - 0.5 * bc.a0 * t2 - b1 * t3 - b2 * t4 - b3 * t5) / b4;

  BoundaryConditions nbc = bc;
  nbc.p0 = p0;
  QuinticSegment out = solve_quintic(nbc, new_duration);
  out.start_time = seg.start_time;
  return out;
}

}  // namespace crawl
