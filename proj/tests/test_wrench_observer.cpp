#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "crawl/rng.hpp"
#include "crawl/wrench_observer.hpp"

using namespace crawl;

namespace {

constexpr double kDt = 0.004;

CentroidalState standing_state(double mass = 85.0) {
  CentroidalState s;
  s.mass = mass;
  s.inertia = Vec3(4.0, 8.0, 9.0).asDiagonal();
  s.com_position = Vec3(0, 0, 0.55);
  // Four contacts balancing gravity, symmetric about the CoM.
  const double fz = mass * kGravity / 4.0;
  for (double sx : {1.0, -1.0}) {
    for (double sy : {1.0, -1.0}) {
      s.contacts.push_back({Vec3(0.35 * sx, 0.28 * sy, 0.0), Vec3(0, 0, fz)});
    }
  }
  return s;
}

/// Run the observer against a ground-truth wrench applied about the CoM: the
/// measured momentum integrates the true dynamics, the observer sees only the
/// known forces.
struct TrueWrenchHarness {
  CentroidalState state = standing_state();
  ObserverState obs;
  Vec3 true_momentum_lin = Vec3::Zero();
  Vec3 true_momentum_ang = Vec3::Zero();

  /// Seed the momentum prediction from the pre-disturbance state.
  void seed(const ObserverGains& gains) {
    obs = observer_step(obs, state, gains, ObserverForm::plain, kDt);
  }

  void step(const Vec3& true_force, const Vec3& true_torque, ObserverForm form,
            const ObserverGains& gains) {
    // Contacts cancel gravity, so only the unknown wrench moves the momentum.
    true_momentum_lin += kDt * true_force;
    true_momentum_ang += kDt * true_torque;
    state.com_velocity = true_momentum_lin / state.mass;
    state.omega = state.inertia.inverse() * true_momentum_ang;
    obs = observer_step(obs, state, gains, form, kDt);
  }
};

}  // namespace

TEST_CASE("observer equilibrium at balanced stance") {
  ObserverState obs;
  const CentroidalState state = standing_state();
  const ObserverGains gains;
  for (int i = 0; i < 500; ++i) {
    obs = observer_step(obs, state, gains, ObserverForm::plain, kDt);
    CHECK(obs.force.norm() < 1e-12);
    CHECK(obs.torque.norm() < 1e-12);
  }
  CHECK(!obs.diverged);
}

TEST_CASE("seeding from a moving start leaves the estimate at zero") {
  CentroidalState state = standing_state();
  state.com_velocity = Vec3(0.4, -0.1, 0.05);
  state.omega = Vec3(0.1, 0.2, -0.1);
  ObserverState obs;
  const ObserverGains gains;
  for (int i = 0; i < 100; ++i) {
    obs = observer_step(obs, state, gains, ObserverForm::plain, kDt);
  }
  // Constant measured momentum with balanced known forces: no discrepancy...
  // except the angular channel sees the constant (x_f - com) x f_z torque,
  // which is zero for the symmetric stance.
  CHECK(obs.force.norm() < 1e-12);
  CHECK(obs.torque.norm() < 1e-12);
}

TEST_CASE("step force follows the first-order response") {
  TrueWrenchHarness h;
  ObserverGains gains;  // conservative preset diag(10)/diag(1)
  h.seed(gains);
  const Vec3 step(100.0, 0.0, 0.0);
  double t63 = -1.0;
  double prev = 0.0;
  for (int k = 1; k <= 250; ++k) {
    h.step(step, Vec3::Zero(), ObserverForm::plain, gains);
    const double t = k * kDt;
    const double expect = 100.0 * (1.0 - std::exp(-10.0 * t));
    // Within 1% of the step amplitude of the continuous response.
    CHECK(std::abs(h.obs.force.x() - expect) < 1.0);
    CHECK(std::abs(h.obs.force.y()) < 1e-9);
    const double target = 100.0 * (1.0 - std::exp(-1.0));
    if (t63 < 0 && h.obs.force.x() >= target) {
      // Sub-tick crossing by linear interpolation.
      t63 = t - kDt * (h.obs.force.x() - target) / (h.obs.force.x() - prev);
    }
    prev = h.obs.force.x();
  }
  // 99% reached around t = 0.46 s.
  CHECK(h.obs.force.x() > 99.0);
  // Time constant 1/gain up to the explicit-Euler bias of gain*dt/2 = 2%.
  CHECK(std::abs(t63 - 0.1) < 0.0021);
  CHECK(!h.obs.diverged);
}

TEST_CASE("constant wrench is the unique fixed point") {
  TrueWrenchHarness h;
  const ObserverGains gains;
  const Vec3 f_true(60.0, -40.0, 30.0);
  const Vec3 tau_true(8.0, -5.0, 4.0);
  for (int k = 0; k < 2500; ++k) {  // 10 s
    h.step(f_true, tau_true, ObserverForm::plain, gains);
  }
  const double wrench_norm =
      std::sqrt(f_true.squaredNorm() + tau_true.squaredNorm());
  CHECK((h.obs.force - f_true).norm() < 0.005 * wrench_norm);
  CHECK((h.obs.torque - tau_true).norm() < 0.005 * wrench_norm);
}

TEST_CASE("noisy step input tracks with observer smoothing") {
  TrueWrenchHarness h;
  ObserverGains gains;
  gains.linear = Mat3::Identity() * 100.0;  // simulation preset
  gains.angular = Mat3::Identity() * 10.0;
  Rng rng(41);
  double force = 0.0;
  double sq_sum = 0.0;
  int samples = 0;
  for (int k = 0; k < 5000; ++k) {
    if (k % 1000 == 0) force = rng.uniform(40.0, 200.0);
    const Vec3 noisy(force + 20.0 * rng.normal(), 20.0 * rng.normal(),
                     20.0 * rng.normal());
    h.step(noisy, Vec3::Zero(), ObserverForm::plain, gains);
    // After the 1/gain transient, the estimate hovers around the step level.
    if (k % 1000 >= 200) {
      sq_sum += std::pow(h.obs.force.x() - force, 2);
      ++samples;
    }
  }
  // Smoothing: the RMS tracking error stays below the 20 N input noise.
  CHECK(std::sqrt(sq_sum / samples) < 15.0);
}

TEST_CASE("plain and spatial forms agree without rotation") {
  TrueWrenchHarness plain, spatial;
  const ObserverGains gains;
  const Vec3 f_true(45.0, 10.0, -20.0);
  for (int k = 0; k < 1000; ++k) {
    plain.step(f_true, Vec3::Zero(), ObserverForm::plain, gains);
    spatial.step(f_true, Vec3::Zero(), ObserverForm::spatial, gains);
    CHECK((plain.obs.force - spatial.obs.force).norm() < 1e-9);
    CHECK((plain.obs.torque - spatial.obs.torque).norm() < 1e-9);
  }

  // With rotation the gyroscopic term separates the two forms (bounded).
  TrueWrenchHarness p2, s2;
  const Vec3 tau_true(6.0, -3.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    p2.step(f_true, tau_true, ObserverForm::plain, gains);
    s2.step(f_true, tau_true, ObserverForm::spatial, gains);
  }
  const double gap = (p2.obs.torque - s2.obs.torque).norm();
  CHECK(gap > 1e-6);
  CHECK(gap < 200.0);  // bounded even as the body keeps spinning up
  CHECK(p2.obs.torque.allFinite());
  CHECK(s2.obs.torque.allFinite());
}

TEST_CASE("unmodeled contacts surface as the estimated wrench") {
  // Stationary stance with the CoM off-center: bilinear force shares keep
  // both the force and the moment balance, so the measured momentum is
  // genuinely constant.
  CentroidalState state = standing_state();
  state.com_position = Vec3(0.05, -0.02, 0.55);
  const double u = (state.com_position.x() + 0.35) / 0.70;
  const double v = (state.com_position.y() + 0.28) / 0.56;
  const double mg = state.mass * kGravity;
  state.contacts = {{Vec3(0.35, 0.28, 0), Vec3(0, 0, mg * u * v)},
                    {Vec3(0.35, -0.28, 0), Vec3(0, 0, mg * u * (1 - v))},
                    {Vec3(-0.35, 0.28, 0), Vec3(0, 0, mg * (1 - u) * v)},
                    {Vec3(-0.35, -0.28, 0), Vec3(0, 0, mg * (1 - u) * (1 - v))}};
  Vec3 contact_force = Vec3::Zero();
  Vec3 contact_torque = Vec3::Zero();
  for (const ContactForce& c : state.contacts) {
    contact_force += c.force;
    contact_torque += (c.position - state.com_position).cross(c.force);
  }
  REQUIRE(contact_torque.norm() < 1e-9);
  state.contacts.clear();  // observer no longer knows about the contacts

  ObserverState obs;
  const ObserverGains gains;
  for (int i = 0; i < 2500; ++i) {
    obs = observer_step(obs, state, gains, ObserverForm::plain, kDt);
  }
  CHECK((obs.force - contact_force).norm() < 0.005 * contact_force.norm());
  CHECK(obs.torque.norm() < 1e-6);
}

TEST_CASE("observer input validation") {
  const CentroidalState state = standing_state();
  ObserverState obs;
  ObserverGains gains;
  CHECK_THROWS_AS(observer_step(obs, state, gains, ObserverForm::plain, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(observer_step(obs, state, gains, ObserverForm::plain, -0.1),
                  std::invalid_argument);

  gains.linear = Mat3::Identity() * -1.0;
  CHECK_THROWS_AS(observer_step(obs, state, gains, ObserverForm::plain, kDt),
                  std::invalid_argument);
  gains.linear = Mat3::Identity();
  gains.linear(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(observer_step(obs, state, gains, ObserverForm::plain, kDt),
                  std::invalid_argument);

  CentroidalState bad = state;
  bad.mass = 0.0;
  gains = ObserverGains{};
  CHECK_THROWS_AS(observer_step(obs, bad, gains, ObserverForm::plain, kDt),
                  std::invalid_argument);
}

TEST_CASE("divergence guardrail latches on sustained growth") {
  TrueWrenchHarness h;
  const ObserverGains gains;
  // Ramp disturbance: the estimate chases it at a constant ~100 N/s rate.
  int latched_at = -1;
  for (int k = 1; k <= 1500; ++k) {
    const double t = k * kDt;
    h.step(Vec3(400.0 * t, 0, 0), Vec3::Zero(), ObserverForm::plain, gains);
    if (latched_at < 0 && h.obs.diverged) latched_at = k;
  }
  CHECK(h.obs.diverged);
  CHECK(latched_at * kDt == doctest::Approx(2.0).epsilon(0.15));

  // Latched flag persists once the disturbance stops growing.
  const double frozen = 400.0 * 1500 * kDt;
  for (int k = 0; k < 1000; ++k) {
    h.step(Vec3(frozen, 0, 0), Vec3::Zero(), ObserverForm::plain, gains);
  }
  CHECK(h.obs.diverged);
}

TEST_CASE("wrench compensation") {
  Vec6 vm, wg, ext;
  vm << 10, 0, 0, 1, 0, 0;
  wg << 0, 0, 834, 0, 0, 0;
  ext << -75, 0, 0, 0, 0, 0;
  const Vec6 out = compensate_wrench(vm, wg, ext);
  CHECK(out(0) == doctest::Approx(85.0));
  CHECK(out(2) == doctest::Approx(834.0));

  CHECK((compensate_wrench(vm, wg, Vec6::Zero()) - (vm + wg)).norm() == 0.0);

  // Additivity.
  Vec6 e1 = Vec6::Random(), e2 = Vec6::Random();
  const Vec6 lhs = compensate_wrench(vm, wg, e1 + e2);
  const Vec6 rhs = compensate_wrench(vm, wg, e1) + compensate_wrench(Vec6::Zero(), Vec6::Zero(), e2);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("zmp shift") {
  SUBCASE("zero wrench gives no shift") {
    CHECK(zmp_shift(Vec6::Zero(), 85.0, 0.55) == Vec2::Zero());
  }

  SUBCASE("pulley experiment numbers") {
    Vec6 w = Vec6::Zero();
    w(0) = -75.0;
    const Vec2 shift = zmp_shift(w, 85.0, 0.55);
    CHECK(shift.x() == doctest::Approx((-75.0 * 0.55) / (-85.0 * 9.81)).epsilon(1e-12));
    CHECK(shift.x() == doctest::Approx(0.0495).epsilon(1e-3));
    CHECK(shift.y() == 0.0);
  }

  SUBCASE("pure pitch torque") {
    Vec6 w = Vec6::Zero();
    w(4) = -10.0;
    const Vec2 shift = zmp_shift(w, 85.0, 0.55);
    CHECK(shift.x() == doctest::Approx(-10.0 / (-85.0 * 9.81)).epsilon(1e-12));
    CHECK(shift.x() == doctest::Approx(0.0120).epsilon(1e-2));
  }

  SUBCASE("moment balance holds for random wrenches") {
    Rng rng(42);
    const double mass = 85.0;
    for (int i = 0; i < 1000; ++i) {
      Vec6 w;
      for (int j = 0; j < 3; ++j) w(j) = rng.uniform(-150.0, 150.0);
      for (int j = 3; j < 6; ++j) w(j) = rng.uniform(-40.0, 40.0);
      if (std::abs(w(2) - mass * kGravity) < 50.0) continue;
      const double h = rng.uniform(0.3, 0.8);
      const Vec2 shift = zmp_shift(w, mass, h);
      const Vec3 lever(shift.x(), shift.y(), h);
      const Vec3 net_force(w(0), w(1), w(2) - mass * kGravity);
      const Vec3 residual = lever.cross(net_force) + Vec3(w(3), w(4), w(5));
      CHECK(residual.head<2>().norm() < 1e-9);
    }
  }

  SUBCASE("near free-fall wrench is rejected") {
    Vec6 w = Vec6::Zero();
    w(2) = 85.0 * kGravity + 0.5;
    CHECK_THROWS_AS(zmp_shift(w, 85.0, 0.55), std::domain_error);
    CHECK_THROWS_AS(zmp_shift(Vec6::Zero(), -1.0, 0.55), std::invalid_argument);
  }
}
