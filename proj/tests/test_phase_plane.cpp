#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixlayer/phase_plane.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "mixlayer/bvp_solver.hpp"
#include "mixlayer/exact_solutions.hpp"
#include "mixlayer/integrator.hpp"

using namespace mixlayer;
using namespace mixlayer::phase;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a mixlayer::Error");
  return ErrorCode::DomainError;
}

// Hermite quadrature of one node interval: exact for the cubic interpolant.
double interval_integral(double h, double f0, double d0, double f1, double d1) {
  return h * (f0 + f1) / 2.0 + h * h * (d0 - d1) / 12.0;
}

}  // namespace

TEST_CASE("tangent-series coefficients match the closed forms") {
  for (double mv : {0.4, 0.6, 1.0, 2.0, 5.0}) {
    const auto chi = chi_coefficients(MValue::finite(mv), 3);
    CHECK(chi[0] == doctest::Approx(-1.0 / (4.0 * mv)).epsilon(1e-14));
    CHECK(chi[1] ==
          doctest::Approx((2.0 * mv - 1.0) / (72.0 * mv * mv)).epsilon(1e-13));
    CHECK(chi[2] == doctest::Approx((2.0 * mv - 1.0) * (2.0 - mv) /
                                    (576.0 * mv * mv * mv))
                        .epsilon(1e-13));
  }

  // m = 1/2: the series terminates after the linear term.
  const auto half = chi_coefficients(MValue::finite(0.5), 10);
  CHECK(half[0] == doctest::Approx(-0.5).epsilon(1e-15));
  for (std::size_t k = 1; k < half.size(); ++k) CHECK(std::abs(half[k]) < 1e-18);
  // ... so the series itself is the exact slope curve (a^2 - phi^2)/2.
  for (double phi : {-0.9, -0.3, 0.2, 0.8}) {
    CHECK(phase_series_eval(MValue::finite(0.5), 1.0, phi, 8) ==
          doctest::Approx((1.0 - phi * phi) / 2.0).epsilon(1e-15));
  }

  // Infinite limit: every coefficient vanishes and f = a(phi + a).
  const auto inf = chi_coefficients(MValue::infinite(), 6);
  for (double c : inf) CHECK(c == 0.0);
  CHECK(phase_series_eval(MValue::infinite(), 2.0, 1.0, 6) ==
        doctest::Approx(2.0 * 3.0).epsilon(1e-15));

  CHECK(code_of([] { chi_coefficients(MValue::finite(1.0), 0); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { chi_coefficients(MValue::finite(1.0), 65); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { phase_series_eval(MValue::finite(1.0), 1.0, -1.5, 8); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("marched curve reproduces the closed form at the bounded case") {
  const auto prof = solve_phase_cp(MValue::finite(0.5), 1.0, 2.0);
  CHECK(prof.termination == PhaseTermination::Truncated);
  CHECK(prof.phi_max() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(prof.phi_min() == doctest::Approx(-1.0 + 1e-3).epsilon(1e-12));
  for (int i = 0; i <= 200; ++i) {
    const double phi = -0.995 + (0.99 - (-0.995)) * i / 200.0;
    CHECK(std::abs(prof.eval(phi) - (1.0 - phi * phi) / 2.0) < 1e-9);
  }
  // Node values are reproduced exactly by the interpolant.
  const std::size_t mid = prof.phi.size() / 2;
  CHECK(prof.eval(prof.phi[mid]) == doctest::Approx(prof.f[mid]).epsilon(1e-14));
  CHECK(code_of([&] { (void)prof.eval(1.5); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { (void)prof.eval(-1.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("steep-exponent curves approach the linear slope law") {
  // Large finite exponent: the slope curve is within O(1/m) of phi + a.
  const auto big = solve_phase_cp(MValue::finite(1e9), 1.0, 3.0);
  CHECK(big.termination == PhaseTermination::Completed);
  for (int i = 0; i <= 100; ++i) {
    const double phi = -0.99 + (2.99 - (-0.99)) * i / 100.0;
    CHECK(std::abs(big.eval(phi) - (phi + 1.0)) < 1e-6);
  }
  // Infinite limit: exact up to integration error.
  const auto lim = solve_phase_cp(MValue::infinite(), 1.0, 3.0);
  CHECK(lim.termination == PhaseTermination::Completed);
  for (int i = 0; i <= 100; ++i) {
    const double phi = -0.99 + (2.99 - (-0.99)) * i / 100.0;
    CHECK(std::abs(lim.eval(phi) - (phi + 1.0)) < 1e-10);
  }
}

TEST_CASE("fold of the slope curve below the bounded regime") {
  // m = 1/3: the orbit peaks exactly at phi = 0 and the square-root contact
  // strength follows from the closed-form solution: f^2 ~ (4/9) a^3 (-phi).
  const auto third = solve_phase_cp(MValue::finite(1.0 / 3.0), 1.0, 2.0);
  REQUIRE(third.termination == PhaseTermination::BranchPoint);
  REQUIRE(third.phi_zero.has_value());
  REQUIRE(third.c_z.has_value());
  CHECK(std::abs(*third.phi_zero) < 1e-6);
  CHECK(*third.c_z == doctest::Approx(4.0 / 9.0).epsilon(1e-6));
  const double dphi = 1e-4;
  CHECK(third.eval(*third.phi_zero - dphi) ==
        doctest::Approx(std::sqrt(*third.c_z * dphi)).epsilon(1e-3));

  // m = 1/4: no zero crossing at all; the fold sits below phi = 0.
  const auto quarter = solve_phase_cp(MValue::finite(0.25), 1.0, 2.0);
  REQUIRE(quarter.termination == PhaseTermination::BranchPoint);
  CHECK(*quarter.phi_zero > -1.0);
  CHECK(*quarter.phi_zero < 0.0);
  CHECK(*quarter.c_z > 0.0);

  // m = 0.4: cross-check fold location and strength against the time-domain
  // orbit: the fold value is phi at the slope zero and c_z = -2 phi'' there.
  const auto p04 = solve_phase_cp(MValue::finite(0.4), 1.0, 2.0);
  REQUIRE(p04.termination == PhaseTermination::BranchPoint);
  CHECK(*p04.phi_zero > 0.0);
  const auto shoot = bvp::shoot_left_bvp(MValue::finite(0.4), 1.0);
  const auto traj = bvp::extend_right(shoot);
  integrator::IntegrationSpec spec;
  spec.m = MValue::finite(0.4);
  const double tau_pk =
      integrator::locate_event(traj, integrator::Event::dphi_zero(), spec);
  const Triple peak = traj.eval(tau_pk);
  CHECK(peak.phi == doctest::Approx(*p04.phi_zero).epsilon(1e-6));
  CHECK(peak.ddphi == doctest::Approx(-*p04.c_z / 2.0).epsilon(1e-6));
}

TEST_CASE("slope curve agrees with the time-domain trajectory") {
  struct Row {
    double m;
    double phi_max;
    double tol;
    double reach;  // minimum far-field coverage of the comparison
  };
  for (const Row& row : {Row{0.6, 60.0, 1e-5, 3.0}, Row{1.0, 60.0, 1e-6, 5.0},
                         Row{2.0, 60.0, 1e-5, 5.0}}) {
    CAPTURE(row.m);
    const MValue m = MValue::finite(row.m);
    const auto shoot = bvp::shoot_left_bvp(m, 1.0);
    const auto prof = solve_phase_cp(m, 1.0, row.phi_max);
    const auto rep = phase_consistency_check(shoot, prof);
    CHECK(rep.max_abs_dev < row.tol);
    CHECK(rep.samples > 300);
    CHECK(rep.phi_lo < -0.99);
    CHECK(rep.phi_hi > row.reach);
  }

  // Bounded case: both sides equal (a^2 - phi^2)/2.
  {
    const MValue m = MValue::finite(0.5);
    const auto shoot = bvp::shoot_left_bvp(m, 1.0);
    const auto prof = solve_phase_cp(m, 1.0, 2.0);
    const auto rep = phase_consistency_check(shoot, prof);
    CHECK(rep.max_abs_dev < 1e-6);
  }

  // Exponential limit: both sides equal phi + a.
  {
    const MValue m = MValue::infinite();
    const auto shoot = bvp::shoot_left_bvp(m, 1.0);
    const auto prof = solve_phase_cp(m, 1.0, 3.0);
    const auto rep = phase_consistency_check(shoot, prof);
    CHECK(rep.max_abs_dev < 1e-6);
  }

  // Guards: mismatched parameters and unsupported regimes.
  {
    const auto shoot = bvp::shoot_left_bvp(MValue::finite(1.0), 1.0);
    const auto prof = solve_phase_cp(MValue::finite(2.0), 1.0, 5.0);
    CHECK(code_of([&] { phase_consistency_check(shoot, prof); }) ==
          ErrorCode::DomainError);
    const auto shoot04 = bvp::shoot_left_bvp(MValue::finite(0.4), 1.0);
    const auto prof04 = solve_phase_cp(MValue::finite(0.4), 1.0, 2.0);
    CHECK(code_of([&] { phase_consistency_check(shoot04, prof04); }) ==
          ErrorCode::RegimeUnsupported);
  }
}

TEST_CASE("two-sided slope bounds hold pointwise") {
  for (double mv : {0.6, 0.7, 1.3, 3.0}) {
    CAPTURE(mv);
    const auto prof = solve_phase_cp(MValue::finite(mv), 1.0, 5.0);
    for (int i = 0; i <= 400; ++i) {
      const double phi = -0.998 + (4.9 - (-0.998)) * i / 400.0;
      const double f = prof.eval(phi);
      const double lower = phi < 1.0 ? (1.0 - phi * phi) / 2.0 : 0.0;
      CHECK(f > lower - 1e-12);
      CHECK(f < (phi + 1.0) + 1e-12);
    }
  }
}

TEST_CASE("integral form of the slope equation holds along the curve") {
  for (const MValue& m : {MValue::finite(0.6), MValue::finite(1.0),
                          MValue::finite(2.0), MValue::infinite()}) {
    CAPTURE(m.str());
    const double a = 1.0;
    const auto prof = solve_phase_cp(m, a, 5.0);
    const double kappa = m.integral_coeff();

    // Exact series integral over the unsampled sliver [-a, phi_front]:
    // integral of a^2 t (1 + sum chi_k t^k) d(a t) from 0 to t_front.
    const double t_front = (prof.phi_min() + a) / a;
    const auto chi = chi_coefficients(m, 8);
    double integral = t_front * t_front / 2.0;
    double tk = t_front * t_front;
    for (std::size_t k = 1; k <= chi.size(); ++k) {
      tk *= t_front;
      integral += chi[k - 1] * tk / (k + 2.0);
    }
    integral *= a * a * a;

    double max_rel = 0.0;
    for (std::size_t i = 0; i + 1 < prof.phi.size(); ++i) {
      const double h = prof.phi[i + 1] - prof.phi[i];
      integral += interval_integral(h, prof.f[i], prof.fdot[i], prof.f[i + 1],
                                    prof.fdot[i + 1]);
      const double lhs = prof.f[i + 1] * prof.fdot[i + 1] +
                         prof.phi[i + 1] * prof.f[i + 1];
      const double scale = a * a * a + std::abs(lhs) + kappa * std::abs(integral);
      max_rel = std::max(max_rel, std::abs(lhs - kappa * integral) / scale);
    }
    CHECK(max_rel < 1e-6);
  }
}

TEST_CASE("closed-form slope solutions annihilate the phase-plane residual") {
  // Pole-feeding parabola f = -phi^2 (m+1)/(6m), any m.
  for (double mv : {0.4, 0.75, 1.0, 2.0}) {
    const MValue m = MValue::finite(mv);
    const double c = (mv + 1.0) / (6.0 * mv);
    for (double phi : {-2.0, -0.5, 0.3, 1.7}) {
      const double res = phase_ode_residual(m, phi, -c * phi * phi,
                                            -2.0 * c * phi, -2.0 * c);
      CHECK(std::abs(res) < 1e-12 * (1.0 + phi * phi * phi * phi));
    }
  }
  // Far-field exact members: constant slope at m = 1, square-root at m = 2.
  for (double phi : {0.5, 2.0, 9.0}) {
    CHECK(phase_ode_residual(MValue::finite(1.0), phi, 1.3025, 0.0, 0.0) == 0.0);
    const double B = 1.5;
    const double res = phase_ode_residual(
        MValue::finite(2.0), phi, B * std::sqrt(phi),
        B / (2.0 * std::sqrt(phi)), -B / (4.0 * std::pow(phi, 1.5)));
    CHECK(std::abs(res) < 1e-13);
  }
  // Exponential-limit line f = a(phi + a).
  for (double phi : {-0.5, 1.0, 4.0}) {
    CHECK(std::abs(phase_ode_residual(MValue::infinite(), phi, 2.0 * (phi + 2.0),
                                      2.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("far-field slope form and coefficient recovery") {
  // Coefficients: B = m b^{1/m} and the two algebraic corrections.
  CHECK(farfield_B(MValue::finite(3.0), 1.0) == doctest::Approx(3.0));
  CHECK(farfield_B(MValue::finite(1.0), 1.3025) == doctest::Approx(1.3025));
  CHECK(farfield_kappa1(MValue::finite(1.0)) == doctest::Approx(-1.0));
  CHECK(farfield_kappa1(MValue::finite(2.0)) == doctest::Approx(-2.0));
  for (double mv : {1.0, 2.0}) {
    CHECK(farfield_c1(MValue::finite(mv), 2.0) == 0.0);
    CHECK(farfield_c2(MValue::finite(mv), 2.0) == 0.0);
  }
  CHECK(farfield_c2(MValue::finite(3.0), 2.0) == 0.0);
  CHECK(farfield_c1(MValue::finite(3.0), 3.0) == doctest::Approx(0.5));

  // m = 3, b = 1: the correction beyond B phi^{2/3} is exactly
  // m(m-1)(m-2)/(m+1) b^{2/m} phi^{-2/m} = 1.5 phi^{-2/3}.
  for (double phi : {150.0, 400.0}) {
    const double lead = 3.0 * std::pow(phi, 2.0 / 3.0);
    const double second = 1.5 * std::pow(phi, -2.0 / 3.0);
    CHECK(phase_farfield(MValue::finite(3.0), 1.0, phi) - lead ==
          doctest::Approx(second).epsilon(1e-12));
  }

  // Admissibility and domain guards.
  CHECK(code_of([] { phase_farfield(MValue::finite(3.0), 1.0, 2.0); }) ==
        ErrorCode::FarFieldNotReached);
  CHECK(code_of([] { phase_farfield(MValue::finite(3.0), -1.0, 10.0); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { phase_farfield(MValue::finite(3.0), 1.0, -5.0); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { phase_farfield(MValue::finite(0.4), 1.0, 10.0); }) ==
        ErrorCode::RegimeUnsupported);
  CHECK(code_of([] { phase_farfield(MValue::finite(0.5), 1.0, 10.0); }) ==
        ErrorCode::RegimeUnsupported);
  CHECK(code_of([] { phase_farfield(MValue::infinite(), 1.0, 10.0); }) ==
        ErrorCode::RegimeUnsupported);

  // Recovering B from a marched profile matches m b^{1/m} using the b value
  // extracted independently in the time domain.
  for (double mv : {0.6, 1.0, 2.0, 3.0}) {
    CAPTURE(mv);
    const MValue m = MValue::finite(mv);
    const double b = bvp::b_table(m);
    const auto prof = solve_phase_cp(m, 1.0, 100.0);
    const double fitted = farfield_fit_B(prof);
    CHECK(fitted == doctest::Approx(farfield_B(m, b)).epsilon(1e-5));
  }

  // A short profile is rejected rather than extrapolated.
  const auto short_prof = solve_phase_cp(MValue::finite(3.0), 1.0, 5.0);
  CHECK(code_of([&] { farfield_fit_B(short_prof); }) ==
        ErrorCode::FarFieldNotReached);
  const auto prof04 = solve_phase_cp(MValue::finite(0.4), 1.0, 2.0);
  CHECK(code_of([&] { farfield_fit_B(prof04); }) ==
        ErrorCode::RegimeUnsupported);
}

TEST_CASE("slope curve is scale equivariant") {
  const auto r1 = phase_scaling_check(MValue::finite(1.0), 2.0);
  CHECK(r1.max_rel_dev < 1e-7);
  const auto r2 = phase_scaling_check(MValue::finite(0.7), 0.5);
  CHECK(r2.max_rel_dev < 1e-7);
  // Folded curve: the fold location itself obeys the scaling.
  const auto r3 = phase_scaling_check(MValue::finite(0.4), 1.5);
  CHECK(r3.max_rel_dev < 1e-6);
  const auto fold_unit = solve_phase_cp(MValue::finite(0.4), 1.0, 2.0);
  const auto fold_scaled = solve_phase_cp(MValue::finite(0.4), 1.5, 3.0);
  CHECK(*fold_scaled.phi_zero ==
        doctest::Approx(1.5 * *fold_unit.phi_zero).epsilon(1e-7));
  CHECK(*fold_scaled.c_z ==
        doctest::Approx(1.5 * 1.5 * 1.5 * *fold_unit.c_z).epsilon(1e-7));
}

TEST_CASE("launch offset does not leak into the marched curve") {
  PhaseConfig twice;
  twice.delta = 2e-3;
  const auto base = solve_phase_cp(MValue::finite(1.0), 1.0, 3.0);
  const auto moved = solve_phase_cp(MValue::finite(1.0), 1.0, 3.0, twice);
  CHECK(std::abs(base.eval(0.0) - moved.eval(0.0)) < 1e-8);
  CHECK(std::abs(base.eval(2.5) - moved.eval(2.5)) < 1e-8);
  // The marched curve also matches the tangent series where both are valid.
  CHECK(base.eval(-0.7) ==
        doctest::Approx(phase_series_eval(MValue::finite(1.0), 1.0, -0.7, 14))
            .epsilon(1e-6));
}

TEST_CASE("power-law ansatz catalogue is exactly the four reducible cases") {
  const auto families = linear_ansatz_families();
  REQUIRE(families.size() == 4);
  CHECK(families[0].m == doctest::Approx(1.0 / 3.0));
  CHECK(families[1].m == doctest::Approx(0.5));
  CHECK(families[2].m == doctest::Approx(1.0));
  CHECK(families[3].m == doctest::Approx(2.0));

  // Each member satisfies the three reduction constraints.
  for (const auto& fam : families) {
    const double A = fam.A_c;
    const double B = fam.B_c;
    CHECK(std::abs(B * B + B) < 1e-14);
    CHECK(std::abs(2.0 * A * A + 7.0 * A + 6.0) < 1e-14);
    CHECK(std::abs(A + 3.0 * A * B + 7.0 * B + (fam.m + 1.0) / fam.m) < 1e-12);
  }

  // Completeness: both quadratics factor over exactly two roots each, and
  // every root pair determines one catalogue member.
  const double a_roots[2] = {-2.0, -1.5};
  const double b_roots[2] = {0.0, -1.0};
  int matched = 0;
  for (double A : a_roots) {
    for (double B : b_roots) {
      const double m = 1.0 / (-A - 3.0 * A * B - 7.0 * B - 1.0);
      for (const auto& fam : families) {
        if (std::abs(fam.m - m) < 1e-12 && fam.A_c == A && fam.B_c == B) {
          ++matched;
        }
      }
    }
  }
  CHECK(matched == 4);

  // Reduced-equation members reproduce the known slope laws.
  const auto& f13 = families[0];
  const auto& f12 = families[1];
  const auto& f1 = families[2];
  const auto& f2 = families[3];
  for (double phi : {-0.8, -0.2, 0.4, 0.9}) {
    CHECK(f12.dphi_dtau(phi, -1.0) ==
          doctest::Approx((1.0 - phi * phi) / 2.0).epsilon(1e-14));
  }
  for (double phi : {0.5, 2.0, 7.0}) {
    CHECK(f1.dphi_dtau(phi, -2.0 * 1.3025) ==
          doctest::Approx(1.3025).epsilon(1e-14));
    CHECK(f2.dphi_dtau(phi, -1.5 * 0.7) ==
          doctest::Approx(0.7 * std::sqrt(phi)).epsilon(1e-14));
  }
  // Bounded m = 1/3 family: C = -a^{3/2} reproduces the rising branch of the
  // closed-form orbit.
  for (double tau : {-2.0, -1.0, -0.4}) {
    const Triple s =
        exact::eval_exact(exact::ExactKind::implicit13_bvp(1.0), tau);
    CHECK(s.dphi == doctest::Approx(f13.dphi_dtau(s.phi, -1.0)).epsilon(1e-10));
  }
}

TEST_CASE("solver input guards") {
  CHECK(code_of([] { solve_phase_cp(MValue::finite(1.0), -1.0, 2.0); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { solve_phase_cp(MValue::finite(1.0), 0.0, 2.0); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { solve_phase_cp(MValue::finite(1.0), 1.0, -1.0); }) ==
        ErrorCode::DomainError);
  PhaseConfig bad;
  bad.delta = 0.5;
  CHECK(code_of([&] { solve_phase_cp(MValue::finite(1.0), 1.0, 2.0, bad); }) ==
        ErrorCode::DomainError);
  PhaseConfig worse;
  worse.floor_f = worse.switch_f;
  CHECK(code_of([&] { solve_phase_cp(MValue::finite(1.0), 1.0, 2.0, worse); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] {
          phase_scaling_check(MValue::finite(1.0), -2.0);
        }) == ErrorCode::DomainError);
}
