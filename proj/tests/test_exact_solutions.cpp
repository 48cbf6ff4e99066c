#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixlayer/exact_solutions.hpp"
#include "mixlayer/series.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace mixlayer;
using namespace mixlayer::exact;

namespace {

const double kPi = M_PI;
const double kS3 = std::sqrt(3.0);

// Residual of the profile equation phi''' + phi phi'' - mu (phi')^2 = 0,
// scaled by the magnitude of its terms.
double ode_residual(const ExactKind& kind, double tau) {
  const Triple t = eval_exact(kind, tau);
  const double d3 = eval_exact_dddphi(kind, tau);
  const double mu = kind.m.quad_coeff();
  const double r = d3 + t.phi * t.ddphi - mu * t.dphi * t.dphi;
  const double scale = std::max({1.0, std::fabs(d3), std::fabs(t.phi * t.ddphi),
                                 std::fabs(mu * t.dphi * t.dphi)});
  return std::fabs(r) / scale;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (n % 2 != 0) ++n;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be thrown");
  return ErrorCode::DomainError;
}

// Bisection root of g on [lo, hi] assuming a sign change.
double find_root(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  REQUIRE(glo * g(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (glo * gm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      glo = gm;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section maximum of g on [lo, hi].
double find_max_arg(const std::function<double(double)>& g, double lo, double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (g(c) > g(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed-form values at reference points") {
  const Triple t0 = eval_exact(ExactKind::tanh_profile(1.0), 0.0);
  CHECK(t0.phi == 0.0);
  CHECK(t0.dphi == 0.5);
  CHECK(t0.ddphi == 0.0);

  const Triple t2 = eval_exact(ExactKind::tanh_profile(1.0), 2.0);
  const double th = std::tanh(1.0), s2 = 1.0 - th * th;
  CHECK(t2.phi == doctest::Approx(th).epsilon(1e-15));
  CHECK(t2.dphi == doctest::Approx(0.5 * s2).epsilon(1e-15));
  CHECK(t2.ddphi == doctest::Approx(-0.5 * s2 * th).epsilon(1e-15));

  const Triple lin = eval_exact(ExactKind::linear(2.0, 1.0), 3.0);
  CHECK(lin.phi == 4.0);
  CHECK(lin.dphi == 2.0);
  CHECK(lin.ddphi == 0.0);
  CHECK(eval_exact_dddphi(ExactKind::linear(2.0, 1.0), 3.0) == 0.0);

  const Triple quad = eval_exact(ExactKind::quadratic(1.5, -1.0), 1.0);
  CHECK(quad.phi == 6.0);
  CHECK(quad.dphi == 6.0);
  CHECK(quad.ddphi == 3.0);

  const Triple ex = eval_exact(ExactKind::exponential(1.0), 0.0);
  CHECK(ex.phi == 0.0);
  CHECK(ex.dphi == 1.0);
  CHECK(ex.ddphi == 1.0);
  CHECK(eval_exact_dddphi(ExactKind::exponential(1.0), 0.0) == 1.0);

  // Pole kind at m=1: coefficient 6m/(m+1) = 3, evaluated one unit left of
  // the pole.
  const ExactKind pole = ExactKind::blowup_pole(MValue::finite(1.0), 2.0);
  const Triple p = eval_exact(pole, 1.0);
  CHECK(p.phi == -3.0);
  CHECK(p.dphi == -3.0);
  CHECK(p.ddphi == -6.0);
  CHECK(eval_exact_dddphi(pole, 1.0) == -18.0);

  const ExactKind cothk = ExactKind::blowup_coth(1.0);
  const Triple c = eval_exact(cothk, 2.0);
  const double ch = std::cosh(1.0), sh = std::sinh(1.0);
  CHECK(c.phi == doctest::Approx(ch / sh).epsilon(1e-15));
  CHECK(c.dphi == doctest::Approx(-0.5 / (sh * sh)).epsilon(1e-15));
  CHECK(c.ddphi == doctest::Approx(0.5 * ch / (sh * sh * sh)).epsilon(1e-15));
}

TEST_CASE("all families satisfy the profile equation") {
  std::vector<ExactKind> kinds = {
      ExactKind::tanh_profile(1.0),         ExactKind::tanh_profile(2.5, 0.7),
      ExactKind::linear(1.3, -0.2),         ExactKind::quadratic(0.8, 0.4),
      ExactKind::exponential(1.0),          ExactKind::exponential(0.6, 1.1),
      ExactKind::blowup_pole(MValue::finite(1.0)),
      ExactKind::blowup_pole(MValue::finite(0.4), 1.0),
      ExactKind::blowup_pole(MValue::infinite()),
      ExactKind::blowup_coth(1.0),          ExactKind::blowup_coth(1.7, -0.5),
      ExactKind::implicit13_bvp(1.0),       ExactKind::implicit13(0.7, 0.3),
  };
  for (const auto& kind : kinds) {
    CAPTURE(exact_family_name(kind.family));
    CAPTURE(kind.a);
    double lo = -6.0, hi = 6.0;
    if (kind.is_singular()) {
      // Sample both sides of the pole, staying 0.4 away from it.
      const double tp = kind.pole_tau();
      for (double s = 0.4; s <= 6.0; s += 0.35) {
        CAPTURE(s);
        CHECK(ode_residual(kind, tp - s) < 1e-10);
        CHECK(ode_residual(kind, tp + s) < 1e-10);
      }
      continue;
    }
    if (kind.family == ExactFamily::Implicit13) {
      hi = kind.pole_tau() - 0.4;
    }
    for (double tau = lo; tau <= hi; tau += 0.31) {
      CAPTURE(tau);
      CHECK(ode_residual(kind, tau) < 1e-10);
    }
  }
}

TEST_CASE("bounded m=1/3 profile: peak normalization and pole") {
  CHECK(std::fabs(eval_implicit_13(1.0, 0.0)) < 1e-12);
  const Triple peak = eval_exact(ExactKind::implicit13_bvp(1.0), 0.0);
  CHECK(std::fabs(peak.phi) < 1e-12);
  CHECK(std::fabs(peak.dphi) < 1e-12);
  CHECK(peak.ddphi == doctest::Approx(-2.0 / 9.0).epsilon(1e-12));

  const double tau_p = 2.0 * kPi * kS3 / 3.0;
  CHECK(ExactKind::implicit13_bvp(1.0).pole_tau() == doctest::Approx(tau_p).epsilon(1e-14));
  // With zero shift the whole curve moves left by sqrt(3) pi / 6.
  CHECK(ExactKind::implicit13(1.0).pole_tau() ==
        doctest::Approx(kS3 * kPi / 2.0).epsilon(1e-14));

  // Monotone decay toward the pole.
  CHECK(eval_implicit_13(1.0, 1.0) < eval_implicit_13(1.0, 0.5));
  CHECK(eval_implicit_13(1.0, 0.5) < 0.0);
  CHECK(eval_implicit_13(1.0, tau_p - 1e-6) < -1e5);

  CHECK(code_of([&] { eval_implicit_13(1.0, tau_p); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { eval_implicit_13(1.0, tau_p + 1.0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] {
          eval_exact(ExactKind::implicit13_bvp(1.0), tau_p + 0.5);
        }) == ErrorCode::OutOfDomain);

  // Left tail approaches the equilibrium -a from above.
  const double d_bvp = 2.0 * kS3 * std::exp(kS3 * kPi / 6.0);
  const double gap10 = eval_implicit_13(1.0, -10.0) + 1.0;
  CHECK(gap10 > 0.0);
  CHECK(gap10 == doctest::Approx(d_bvp * std::exp(-10.0)).epsilon(1e-3));
  // Deep tail, where the implicit relation is replaced by the manifold form.
  const double gap40 = eval_implicit_13(1.0, -40.0) + 1.0;
  CHECK(gap40 == doctest::Approx(d_bvp * std::exp(-40.0)).epsilon(1e-12));
}

TEST_CASE("bounded m=1/3 profile: inverse consistency on both branches") {
  for (double a : {1.0, 2.3}) {
    CAPTURE(a);
    const double ra = std::sqrt(a);
    for (double frac : {0.1, 0.3, 0.6, 0.9}) {
      const double u = frac * ra;
      const double tau = implicit13_tau(a, u, 1);
      CHECK(tau <= 0.0);
      const double phi = eval_implicit_13(a, tau);
      CHECK(std::sqrt(-phi) == doctest::Approx(u).epsilon(1e-10));
    }
    for (double u : {0.2, 0.7, 1.5, 4.0}) {
      const double tau = implicit13_tau(a, u, 2);
      CHECK(tau > 0.0);
      CHECK(tau < ExactKind::implicit13_bvp(a).pole_tau());
      const double phi = eval_implicit_13(a, tau);
      CHECK(std::sqrt(-phi) == doctest::Approx(u).epsilon(1e-10));
    }
  }
  CHECK(code_of([] { implicit13_tau(1.0, 0.5, 3); }) == ErrorCode::DomainError);
  CHECK(code_of([] { implicit13_tau(1.0, 1.0, 1); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([] { implicit13_tau(1.0, -0.1, 2); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("bounded m=1/3 profile: amplitude scaling") {
  for (double tau : {-3.0, -0.7, 0.4, 1.5}) {
    CAPTURE(tau);
    CHECK(eval_implicit_13(2.0, tau) ==
          doctest::Approx(2.0 * eval_implicit_13(1.0, 2.0 * tau)).epsilon(1e-10));
  }
}

TEST_CASE("stable-manifold amplitude per family") {
  CHECK(lyapunov_parameter(ExactKind::tanh_profile(1.0)) == doctest::Approx(2.0));
  CHECK(lyapunov_parameter(ExactKind::tanh_profile(2.0, 0.5)) ==
        doctest::Approx(4.0 * std::exp(-1.0)));
  CHECK(lyapunov_parameter(ExactKind::exponential(1.0)) == doctest::Approx(1.0));
  CHECK(lyapunov_parameter(ExactKind::exponential(0.5, -1.0)) ==
        doctest::Approx(0.5 * std::exp(0.5)));
  CHECK(lyapunov_parameter(ExactKind::implicit13(1.0)) ==
        doctest::Approx(2.0 * kS3 * std::exp(kS3 * kPi / 3.0)).epsilon(1e-14));
  CHECK(lyapunov_parameter(ExactKind::implicit13_bvp(1.0)) ==
        doctest::Approx(8.579306).epsilon(1e-5));
  CHECK(lyapunov_parameter(ExactKind::blowup_coth(1.0)) == doctest::Approx(-2.0));

  CHECK(code_of([] { lyapunov_parameter(ExactKind::linear(1.0)); }) ==
        ErrorCode::NoManifoldForm);
  CHECK(code_of([] { lyapunov_parameter(ExactKind::quadratic(1.0)); }) ==
        ErrorCode::NoManifoldForm);
  CHECK(code_of([] {
          lyapunov_parameter(ExactKind::blowup_pole(MValue::finite(1.0)));
        }) == ErrorCode::NoManifoldForm);
}

TEST_CASE("manifold amplitude matches the series far on the left") {
  struct Case {
    ExactKind kind;
    double tol;
  };
  const std::vector<Case> cases = {
      {ExactKind::tanh_profile(1.0, 0.3), 1e-12},
      {ExactKind::exponential(1.2, -0.4), 1e-12},
      {ExactKind::implicit13(1.0, 0.0), 1e-9},
      {ExactKind::blowup_coth(1.0, 0.5), 1e-12},
  };
  for (const auto& c : cases) {
    CAPTURE(exact_family_name(c.kind.family));
    const double a = c.kind.a;
    const double d = lyapunov_parameter(c.kind);
    const auto coeffs = series::lyapunov_coeffs(c.kind.m, a, 10);
    const double tau = -6.0 / a;
    const auto s = series::eval_lyapunov(coeffs, d, tau);
    const Triple t = eval_exact(c.kind, tau);
    CHECK(t.phi == doctest::Approx(s.phi).epsilon(c.tol));
    CHECK(t.dphi == doctest::Approx(s.dphi).epsilon(c.tol));
    CHECK(t.ddphi == doctest::Approx(s.ddphi).epsilon(c.tol));
  }
}

TEST_CASE("pole evaluation throws exactly at the pole") {
  CHECK(code_of([] {
          eval_exact(ExactKind::blowup_pole(MValue::finite(1.0), 2.0), 2.0);
        }) == ErrorCode::UndefinedAtPole);
  CHECK(code_of([] { eval_exact(ExactKind::blowup_coth(1.0), 0.0); }) ==
        ErrorCode::UndefinedAtPole);
  CHECK(code_of([] {
          eval_exact_dddphi(ExactKind::blowup_pole(MValue::finite(2.0)), 0.0);
        }) == ErrorCode::UndefinedAtPole);
}

TEST_CASE("factories reject bad amplitudes") {
  CHECK_THROWS_AS(ExactKind::tanh_profile(0.0), Error);
  CHECK_THROWS_AS(ExactKind::exponential(-1.0), Error);
  CHECK_THROWS_AS(ExactKind::implicit13(0.0), Error);
  CHECK_THROWS_AS(preset_problem(PresetName::FloodedJet, 1.0, 0.0), Error);
  CHECK_THROWS_AS(preset_problem(PresetName::FloodedJet, -1.0, 1.0), Error);
}

TEST_CASE("flooded jet preset: wall values, momentum flux and stream function") {
  const auto f = preset_problem(PresetName::FloodedJet, 1.0, 1.0);
  CHECK(f.m.value() == 0.5);
  CHECK(f.u(8.0, 0.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(f.psi(2.0, 0.0) == 0.0);
  CHECK(code_of([&] { f.u(0.0, 1.0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { f.u(-1.0, 1.0); }) == ErrorCode::OutOfDomain);

  // Momentum-flux integral of the profile: int (phi')^2 dtau = 2 a^3 / 3.
  const ExactKind tk = ExactKind::tanh_profile(1.0);
  const double I = simpson(
      [&](double t) {
        const double dp = eval_exact(tk, t).dphi;
        return dp * dp;
      },
      -40.0, 40.0, 4000);
  CHECK(I == doctest::Approx(2.0 / 3.0).epsilon(1e-8));

  // u = d(psi)/dy and v = -d(psi)/dx, checked by central differences.
  const double h = 1e-5;
  for (auto [x, y] : std::vector<std::pair<double, double>>{
           {0.75, 0.5}, {2.0, -1.0}, {5.0, 3.0}}) {
    CAPTURE(x);
    CAPTURE(y);
    const double du = (f.psi(x, y + h) - f.psi(x, y - h)) / (2.0 * h);
    const double dv = -(f.psi(x + h, y) - f.psi(x - h, y)) / (2.0 * h);
    CHECK(f.u(x, y) == doctest::Approx(du).epsilon(1e-6));
    CHECK(f.v(x, y) == doctest::Approx(dv).epsilon(1e-6));
  }
}

TEST_CASE("flooded jet preset: transverse-velocity landmarks at x = 0.75") {
  const auto f = preset_problem(PresetName::FloodedJet, 1.0, 1.0);
  const double x = 0.75;

  // Zero of v above the axis (outflow/entrainment boundary).
  const double y0 = find_root([&](double y) { return f.v(x, y); }, 0.1, 10.0);
  CHECK(y0 == doctest::Approx(3.11308).epsilon(2e-5));

  // Interior maximum of v and its location.
  const double ymax = find_max_arg([&](double y) { return f.v(x, y); }, 0.01, y0);
  CHECK(ymax == doctest::Approx(1.49215).epsilon(1e-4));
  CHECK(f.v(x, ymax) == doctest::Approx(0.227294).epsilon(1e-4));

  // Far-field entrainment limit -a sqrt(nu/3) x^{-2/3}.
  const double vlim = -std::sqrt(1.0 / 3.0) * std::pow(x, -2.0 / 3.0);
  CHECK(vlim == doctest::Approx(-0.69941).epsilon(1e-5));
  CHECK(f.v(x, 70.0) == doctest::Approx(-0.69941).epsilon(1e-5));
}

TEST_CASE("separation preset: stagnation wall and stream function") {
  const auto f = preset_problem(PresetName::Separation, 1.0, 1.0);
  CHECK(f.m.is_infinite());
  CHECK(f.u(0.0, 0.0) == 0.0);  // x = 0 is allowed here
  CHECK(f.u(1.0, 0.0) == 1.0);
  CHECK(f.v(1.0, 0.0) == 0.0);
  CHECK(f.psi(1.0, -1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-14));
  CHECK(code_of([&] { f.u(-0.1, 0.0); }) == ErrorCode::OutOfDomain);

  // The wall shear vanishes at the origin: du/dy(0, 0) = 0.
  const double h = 1e-6;
  CHECK(std::fabs((f.u(0.0, h) - f.u(0.0, -h)) / (2.0 * h)) < 1e-12);

  const double x = 1.5, y = -0.8;
  const double du = (f.psi(x, y + h) - f.psi(x, y - h)) / (2.0 * h);
  const double dv = -(f.psi(x + h, y) - f.psi(x - h, y)) / (2.0 * h);
  CHECK(f.u(x, y) == doctest::Approx(du).epsilon(1e-6));
  CHECK(f.v(x, y) == doctest::Approx(dv).epsilon(1e-6));
}

TEST_CASE("near-wall jet preset: axis values, domain edge and stream function") {
  const auto f = preset_problem(PresetName::NearWallJet, 1.0, 1.0);
  CHECK(f.m.value() == doctest::Approx(1.0 / 3.0));
  CHECK(f.psi(2.0, 0.0) == doctest::Approx(0.0));
  CHECK(std::fabs(f.u(2.0, 0.0)) < 1e-11);
  CHECK(f.u(1.0, 1.0) > 0.0);   // forward stream above the axis
  CHECK(f.u(1.0, -1.0) < 0.0);  // reversed flow between axis and pole line
  CHECK(code_of([&] { f.u(0.0, 1.0); }) == ErrorCode::OutOfDomain);

  // The flow is only defined above the pole line tau = -tau_p.
  const double tau_p = ExactKind::implicit13_bvp(1.0).pole_tau();
  const double y_edge = -tau_p * 2.0;  // x = 1, nu = 1
  CHECK(code_of([&] { f.u(1.0, y_edge - 0.1); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { f.u(1.0, y_edge); }) == ErrorCode::OutOfDomain);
  CHECK(std::isfinite(f.u(1.0, y_edge + 0.05)));

  const double h = 1e-5;
  for (auto [x, y] : std::vector<std::pair<double, double>>{
           {1.2, 0.8}, {2.0, -1.0}}) {
    CAPTURE(x);
    CAPTURE(y);
    const double du = (f.psi(x, y + h) - f.psi(x, y - h)) / (2.0 * h);
    const double dv = -(f.psi(x + h, y) - f.psi(x - h, y)) / (2.0 * h);
    CHECK(f.u(x, y) == doctest::Approx(du).epsilon(1e-6));
    CHECK(f.v(x, y) == doctest::Approx(dv).epsilon(1e-6));
  }
}
