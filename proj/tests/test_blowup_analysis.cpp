#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixlayer/blowup_analysis.hpp"
#include "mixlayer/exact_solutions.hpp"
#include "mixlayer/integrator.hpp"

using namespace mixlayer;
using namespace mixlayer::blowup;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::logic_error("expected an Error");
}

}  // namespace

TEST_CASE("regime boundary constant and classification") {
  const double m1 = (-17.0 + 12.0 * std::sqrt(6.0)) / 23.0;
  CHECK(m1_constant() == doctest::Approx(m1).epsilon(1e-15));
  CHECK(std::fabs(kappa(m1_constant())) < 1e-12);
  CHECK(m1_constant() == doctest::Approx(0.538864213).epsilon(1e-9));
  CHECK(m1_constant() > 0.5);

  const auto f1 = pole_local_form(1.0);
  CHECK(f1.regime == PoleRegime::ComplexPair);
  CHECK(f1.alpha == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f1.beta.has_value());
  CHECK(*f1.beta == doctest::Approx(std::sqrt(32.0) / 4.0).epsilon(1e-15));
  CHECK(!f1.lambda1.has_value());
  CHECK(f1.lambda3 == -1.0);
  CHECK(f1.m1_const == doctest::Approx(m1).epsilon(1e-15));

  const auto fhalf = pole_local_form(0.5);
  CHECK(fhalf.regime == PoleRegime::RealPair);
  CHECK(*fhalf.lambda1 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(*fhalf.lambda2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(!fhalf.beta.has_value());

  // Within snapping distance of the boundary the double-root form wins.
  const auto fdr = pole_local_form(0.538864213);
  CHECK(fdr.regime == PoleRegime::DoubleRoot);
  CHECK(*fdr.lambda1 == doctest::Approx(fdr.alpha).epsilon(1e-15));
  CHECK(pole_local_form(m1_constant()).regime == PoleRegime::DoubleRoot);
  CHECK(pole_local_form(0.5388).regime == PoleRegime::RealPair);
  CHECK(pole_local_form(0.53887).regime == PoleRegime::ComplexPair);

  CHECK(code_of([] { pole_local_form(0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { pole_local_form(-2.0); }) == ErrorCode::DomainError);
}

TEST_CASE("eigenvalue identities hold across the parameter range") {
  for (double m : {0.1, 0.25, 0.4, 0.5, 0.53, 0.6, 1.0, 2.0, 10.0, 100.0}) {
    CAPTURE(m);
    const auto form = pole_local_form(m);
    // lambda = -1 is always a root of the cubic.
    CHECK(std::fabs(cubic_residual(m, -1.0)) < 1e-12);
    if (form.regime == PoleRegime::RealPair) {
      CHECK(*form.lambda1 >= *form.lambda2);
      CHECK(*form.lambda2 > 0.0);
      CHECK(std::fabs(cubic_residual(m, *form.lambda1)) < 1e-10);
      CHECK(std::fabs(cubic_residual(m, *form.lambda2)) < 1e-10);
      CHECK(*form.lambda1 * *form.lambda2 == doctest::Approx(6.0).epsilon(1e-12));
      CHECK(*form.lambda1 + *form.lambda2 ==
            doctest::Approx((m + 7.0) / (m + 1.0)).epsilon(1e-12));
    } else if (form.regime == PoleRegime::ComplexPair) {
      const double a = form.alpha;
      const double b = *form.beta;
      CHECK(a * a + b * b == doctest::Approx(6.0).epsilon(1e-12));
      CHECK(2.0 * a == doctest::Approx((m + 7.0) / (m + 1.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Bernoulli numbers from the standard recurrence") {
  const auto b = bernoulli_numbers(40);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(b[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(b[4] == doctest::Approx(-1.0 / 30.0).epsilon(1e-13));
  CHECK(b[6] == doctest::Approx(1.0 / 42.0).epsilon(1e-13));
  CHECK(b[8] == doctest::Approx(-1.0 / 30.0).epsilon(1e-12));
  CHECK(b[10] == doctest::Approx(5.0 / 66.0).epsilon(1e-12));
  CHECK(b[12] == doctest::Approx(-691.0 / 2730.0).epsilon(1e-12));
  CHECK(b[20] == doctest::Approx(-174611.0 / 330.0).epsilon(1e-10));
  for (int n = 3; n <= 39; n += 2) CHECK(b[static_cast<size_t>(n)] == 0.0);
  CHECK(code_of([] { bernoulli_numbers(-1); }) == ErrorCode::DomainError);
}

TEST_CASE("Bernoulli series agrees with the closed correction factor") {
  // Leading coefficient D_1 = 1: one-term truncation is exactly C2 x^2.
  const double w = 0.01;  // C2(1) x^2
  const double x = std::sqrt(12.0 * w);
  CHECK(bernoulli_series_y12(1.0, x, 1) == doctest::Approx(w).epsilon(1e-14));
  // Next two coefficients: -(1/5) and (2/35).
  const double d2 = bernoulli_series_y12(1.0, x, 2) - bernoulli_series_y12(1.0, x, 1);
  CHECK(d2 == doctest::Approx(-(1.0 / 5.0) * w * w).epsilon(1e-12));
  const double d3 = bernoulli_series_y12(1.0, x, 3) - bernoulli_series_y12(1.0, x, 2);
  CHECK(d3 == doctest::Approx((2.0 / 35.0) * w * w * w).epsilon(1e-12));

  CHECK(bernoulli_series_y12(1.0, 0.0, 6) == 0.0);
  CHECK(std::fabs(bernoulli_series_y12(1.0, 0.5, 6) - coth_y12(1.0, 0.5)) <
        1e-10);
  for (double a : {1.0, 0.7}) {
    for (double xx = -1.0; xx <= 1.001; xx += 0.13) {
      CAPTURE(a);
      CAPTURE(xx);
      CHECK(std::fabs(bernoulli_series_y12(a, xx, 6) - coth_y12(a, xx)) <
            1e-10);
    }
  }
  // Deeper in the window a longer truncation still converges.
  CHECK(std::fabs(bernoulli_series_y12(1.0, 2.6, 20) - coth_y12(1.0, 2.6)) <
        1e-12);

  CHECK(code_of([] { bernoulli_series_y12(1.0, 3.15, 6); }) ==
        ErrorCode::OutOfWindow);
  CHECK(code_of([] { bernoulli_series_y12(2.0, 1.6, 6); }) ==
        ErrorCode::OutOfWindow);
  CHECK_NOTHROW(bernoulli_series_y12(2.0, 1.5, 6));
  CHECK(code_of([] { bernoulli_series_y12(1.0, 0.5, 0); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { bernoulli_series_y12(1.0, 0.5, 21); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("local family reduces to the pure pole at C1 = C2 = 0") {
  for (double m : {0.3, 1.0, 2.5}) {
    CAPTURE(m);
    for (double dx : {0.3, 0.05, -0.05, -0.3}) {
      CAPTURE(dx);
      const double phi = blowup_local_eval(m, 1.0, 0.0, 0.0, 1.0 + dx);
      CHECK(phi == doctest::Approx(6.0 * m / ((m + 1.0) * dx)).epsilon(1e-14));
    }
  }
}

TEST_CASE("local family matches the exact coth blow-up at m = 1/2") {
  // C1 = 0, C2 = a^2/12 selects the closed-form member; the principal term
  // differs from it by the next series order, ~3e-6 at this distance.
  const auto kind = exact::ExactKind::blowup_coth(1.0, 0.0);
  for (double dx : {0.1, -0.1, 0.05}) {
    CAPTURE(dx);
    const double local = blowup_local_eval(0.5, 0.0, 0.0, 1.0 / 12.0, dx);
    const double exact_phi = exact::eval_exact(kind, dx).phi;
    CHECK(std::fabs(local - exact_phi) < 5e-6);
  }
  // The same member written through the correction factor.
  const double phi_via_y = 2.0 / 0.1 * (1.0 + coth_y12(1.0, 0.1));
  CHECK(exact::eval_exact(kind, 0.1).phi ==
        doctest::Approx(phi_via_y).epsilon(1e-14));
}

TEST_CASE("oscillatory regime has log-periodic structure") {
  // For m > m1 the correction is x^alpha times a function periodic in ln x
  // with period 2 pi / beta.
  const auto form = pole_local_form(1.0);
  const double beta = *form.beta;
  const double pi = std::acos(-1.0);
  const double x1 = 0.3;
  const double x2 = x1 * std::exp(-2.0 * pi / beta);
  auto y_of = [&](double x) {
    const double phi = blowup_local_eval(1.0, 0.0, 0.4, -0.3, x);
    return phi * (1.0 + 1.0) * x / (6.0 * 1.0) - 1.0;
  };
  const double r1 = y_of(x1) / std::pow(x1, form.alpha);
  const double r2 = y_of(x2) / std::pow(x2, form.alpha);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-10));
}

TEST_CASE("local evaluation guards its domain") {
  CHECK(code_of([] { blowup_local_eval(1.0, 2.0, 0.1, 0.1, 2.0); }) ==
        ErrorCode::UndefinedAtPole);
  CHECK(code_of([] { blowup_local_eval(1.0, 2.0, 0.1, 0.1, 2.6); }) ==
        ErrorCode::OutsideLocalRadius);
  CHECK(code_of([] { blowup_local_eval(1.0, 2.0, 0.1, 0.1, 1.4); }) ==
        ErrorCode::OutsideLocalRadius);
  CHECK_NOTHROW(blowup_local_eval(1.0, 2.0, 0.1, 0.1, 2.9, 1.0));
  CHECK(code_of([] { blowup_local_eval(-1.0, 0.0, 0.0, 0.0, 0.1); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([] { blowup_local_eval(1.0, 0.0, 0.0, 0.0, 0.1, -0.5); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("round trip: launch from the local form, integrate away and back") {
  // m = 1/2, a = 1 member: launch just off the pole using the closed form,
  // run to tau = 2, turn around, and compare the return against the local
  // principal form at x = 0.05.
  const auto kind = exact::ExactKind::blowup_coth(1.0, 0.0);
  const auto start = exact::eval_exact(kind, 0.01);

  integrator::IntegrationSpec spec;
  spec.m = MValue::finite(0.5);
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-14;
  spec.events = {integrator::Event::stop_at(2.0)};

  integrator::OdeState s0{0.01, start.phi, start.dphi, start.ddphi};
  const Profile out = integrator::integrate(s0, integrator::Direction::Right, spec);
  CHECK(out.termination.kind == TerminationKind::Completed);

  const auto end = out.eval(out.tau_back());
  integrator::OdeState s1{out.tau_back(), end.phi, end.dphi, end.ddphi};
  integrator::IntegrationSpec back = spec;
  back.events = {integrator::Event::stop_at(0.05)};
  const Profile ret = integrator::integrate(s1, integrator::Direction::Left, back);

  const double phi_back = ret.eval(0.05).phi;
  const double local = blowup_local_eval(0.5, 0.0, 0.0, 1.0 / 12.0, 0.05);
  CHECK(std::fabs(phi_back - local) < 1e-6);
  // And to full accuracy against the closed form itself.
  CHECK(phi_back ==
        doctest::Approx(exact::eval_exact(kind, 0.05).phi).epsilon(1e-9));
}
