#include "mixlayer/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "mixlayer/integrator.hpp"

namespace mixlayer::phase {

namespace {

constexpr int kMaxChiOrder = 64;
constexpr std::size_t kMaxSteps = 2000000;

double inv_m_of(const MValue& m) {
  return m.is_infinite() ? 0.0 : 1.0 / m.value();
}

void check_amplitude(double a) {
  if (!(std::isfinite(a) && a > 0.0)) {
    fail(ErrorCode::DomainError, "amplitude a must be positive and finite");
  }
}

// ---------------------------------------------------------------------------
// Embedded Dormand-Prince 5(4) step for a two-component system y' = rhs(x, y).
// Returns the 5th-order update and the embedded error estimate.
using Vec2 = std::array<double, 2>;

template <class Rhs>
void dp_step(const Rhs& rhs, double x, const Vec2& y, double h, Vec2& y_out,
             Vec2& err_out) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const Vec2 k1 = rhs(x, y);
  Vec2 t;
  for (int i = 0; i < 2; ++i) t[i] = y[i] + h * a21 * k1[i];
  const Vec2 k2 = rhs(x + c2 * h, t);
  for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const Vec2 k3 = rhs(x + c3 * h, t);
  for (int i = 0; i < 2; ++i)
    t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const Vec2 k4 = rhs(x + c4 * h, t);
  for (int i = 0; i < 2; ++i)
    t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  const Vec2 k5 = rhs(x + c5 * h, t);
  for (int i = 0; i < 2; ++i)
    t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                       a65 * k5[i]);
  const Vec2 k6 = rhs(x + h, t);
  for (int i = 0; i < 2; ++i)
    y_out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                           b6 * k6[i]);
  const Vec2 k7 = rhs(x + h, y_out);
  for (int i = 0; i < 2; ++i)
    err_out[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                      e6 * k6[i] + e7 * k7[i]);
}

double error_norm(const Vec2& err, const Vec2& y_old, const Vec2& y_new,
                  const Vec2& abs_scale, double rel_tol) {
  double norm = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double sc =
        abs_scale[i] + rel_tol * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
    const double r = err[i] / sc;
    norm += r * r;
  }
  return std::sqrt(0.5 * norm);
}

double next_step_factor(double err) {
  const double f = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
  return std::clamp(f, 0.2, 5.0);
}

// Cubic Hermite interpolation of (v0, d0) -- (v1, d1) over a span h at local
// parameter t in [0, 1].
double hermite(double t, double h, double v0, double d0, double v1, double d1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h * d0 +
         (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * d1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Local series
// ---------------------------------------------------------------------------

std::vector<double> chi_coefficients(const MValue& m, int order) {
  if (order < 1 || order > kMaxChiOrder) {
    fail(ErrorCode::DomainError, "chi series order must lie in [1, " +
                                     std::to_string(kMaxChiOrder) + "]");
  }
  const double inv_m = inv_m_of(m);
  std::vector<double> chi(static_cast<std::size_t>(order), 0.0);
  chi[0] = -0.25 * inv_m;
  for (int k = 2; k <= order; ++k) {
    double conv = 0.0;
    for (int l = 1; l <= k - 1; ++l) {
      conv += (l * (k + 3) + 1.0) * chi[l - 1] * chi[k - l - 1];
    }
    const double linear = (inv_m + (k - 1.0)) * chi[k - 2];
    chi[k - 1] = -(linear + conv) / ((k + 1.0) * (k + 1.0));
  }
  return chi;
}

double phase_series_eval(const MValue& m, double a, double phi, int order) {
  check_amplitude(a);
  const double t = (phi + a) / a;
  if (t < 0.0) {
    fail(ErrorCode::DomainError,
         "phase series is defined for phi >= -a only");
  }
  const std::vector<double> chi = chi_coefficients(m, order);
  double sum = 0.0;
  double tk = 1.0;
  for (double c : chi) {
    tk *= t;
    sum += c * tk;
  }
  return a * a * t * (1.0 + sum);
}

double phase_ode_residual(const MValue& m, double phi, double f, double fdot,
                          double fddot) {
  return f * fddot + fdot * fdot + phi * fdot - m.quad_coeff() * f;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

void PhaseConfig::validate() const {
  if (!(delta >= 1e-6 && delta <= 0.05)) {
    fail(ErrorCode::DomainError, "phase launch offset delta out of [1e-6, 0.05]");
  }
  if (series_order < 2 || series_order > 16) {
    fail(ErrorCode::DomainError, "phase series order out of [2, 16]");
  }
  if (!(rel_tol >= 1e-14 && rel_tol <= 1e-4) ||
      !(abs_tol >= 1e-16 && abs_tol <= 1e-4)) {
    fail(ErrorCode::DomainError, "phase tolerances out of range");
  }
  if (!(max_dphi >= 1e-3 && max_dphi <= 1.0)) {
    fail(ErrorCode::DomainError, "phase max step out of [1e-3, 1]");
  }
  if (!(switch_f >= 1e-6 && switch_f <= 0.5)) {
    fail(ErrorCode::DomainError, "phase fold switch level out of [1e-6, 0.5]");
  }
  if (!(floor_f >= 1e-14 && floor_f < switch_f)) {
    fail(ErrorCode::DomainError,
         "phase floor must lie in [1e-14, switch level)");
  }
}

const char* phase_termination_name(PhaseTermination t) {
  switch (t) {
    case PhaseTermination::Completed: return "completed";
    case PhaseTermination::BranchPoint: return "branch_point";
    case PhaseTermination::Truncated: return "truncated";
  }
  return "unknown";
}

namespace {

// Appends a node, keeping phi strictly increasing (a duplicate abscissa
// overwrites the previous node; descent steps can stall in phi near the fold).
void record_node(PhaseProfile& out, double phi, double f, double fdot) {
  if (!out.phi.empty() && phi <= out.phi.back()) {
    out.phi.back() = phi;
    out.f.back() = f;
    out.fdot.back() = fdot;
    return;
  }
  out.phi.push_back(phi);
  out.f.push_back(f);
  out.fdot.push_back(fdot);
}

// Index of the first node laid down by the fold descent, if any: intervals at
// and beyond it interpolate f^2 (smooth through the square-root contact)
// instead of f itself.
std::size_t fold_start_of(const PhaseProfile& p) {
  if (p.termination != PhaseTermination::BranchPoint) return p.phi.size();
  // The descent was entered below f = switch_f * a^2 with f decreasing; the
  // stored c_z anchors the terminal interval, so any interior interval can be
  // located by walking back from the end while f keeps increasing.
  std::size_t i = p.phi.size() - 1;
  while (i > 0 && p.f[i - 1] > p.f[i]) --i;
  return i > 0 ? i - 1 : 0;
}

}  // namespace

double PhaseProfile::eval(double phi_query) const {
  if (phi.size() < 2) {
    fail(ErrorCode::OutOfDomain, "phase profile has no interior to evaluate");
  }
  const double lo = phi.front();
  const double hi = phi.back();
  const double slack = 1e-12 * (1.0 + hi - lo);
  if (phi_query < lo - slack || phi_query > hi + slack) {
    fail(ErrorCode::OutOfDomain, "phi outside the computed phase profile");
  }
  const double q = std::clamp(phi_query, lo, hi);
  auto it = std::upper_bound(phi.begin(), phi.end(), q);
  std::size_t i = static_cast<std::size_t>(std::distance(phi.begin(), it));
  i = (i == 0) ? 0 : i - 1;
  if (i >= phi.size() - 1) i = phi.size() - 2;

  const double h = phi[i + 1] - phi[i];
  const double t = (q - phi[i]) / h;
  if (termination == PhaseTermination::BranchPoint && i >= fold_start_of(*this)) {
    // Interpolate f^2, whose slope is 2 f fdot = 2 g (finite through the fold:
    // at the terminal node 2g = -c_z).
    const double v0 = f[i] * f[i];
    const double v1 = f[i + 1] * f[i + 1];
    const double d0 = 2.0 * f[i] * fdot[i];
    const double d1 = (i + 2 == phi.size() && c_z) ? -*c_z
                                                   : 2.0 * f[i + 1] * fdot[i + 1];
    const double fsq = hermite(t, h, v0, d0, v1, d1);
    return std::sqrt(std::max(fsq, 0.0));
  }
  return hermite(t, h, f[i], fdot[i], f[i + 1], fdot[i + 1]);
}

PhaseProfile solve_phase_cp(const MValue& m, double a, double phi_max,
                            const PhaseConfig& cfg) {
  cfg.validate();
  check_amplitude(a);
  const double phi0 = -a + cfg.delta * a;
  if (!std::isfinite(phi_max) || phi_max < phi0 + 9.0 * cfg.delta * a) {
    fail(ErrorCode::DomainError,
         "phi_max must exceed the series launch point -a(1 - delta)");
  }

  const double mu = m.quad_coeff();
  const bool can_fold = !m.is_infinite() && m.value() < 0.5;

  PhaseProfile out;
  out.m = m;
  out.a = a;

  // Launch values from the tangent series at t = delta.
  const std::vector<double> chi = chi_coefficients(m, cfg.series_order);
  double s_val = 1.0, s_slope = 1.0;
  {
    double tk = 1.0;
    for (std::size_t k = 1; k <= chi.size(); ++k) {
      tk *= cfg.delta;
      s_val += chi[k - 1] * tk;
      s_slope += (k + 1.0) * chi[k - 1] * tk;
    }
  }
  double x = phi0;
  Vec2 y = {a * a * cfg.delta * s_val, a * s_slope};
  record_node(out, x, y[0], y[1]);

  const auto rhs_phi = [mu](double phi, const Vec2& v) -> Vec2 {
    return {v[1], (mu * v[0] - v[1] * v[1] - phi * v[1]) / v[0]};
  };
  const Vec2 abs_scale = {cfg.abs_tol * a * a, cfg.abs_tol * a};
  const double h_max = cfg.max_dphi * a;
  const double floor_f = cfg.floor_f * a * a;
  const double switch_f = cfg.switch_f * a * a;

  double h = std::min({1e-3 * a, h_max, phi_max - x});
  bool fold = false;
  std::size_t steps = 0;
  while (x < phi_max * (1.0 - 1e-15) - 1e-15 * a) {
    if (++steps > kMaxSteps) {
      fail(ErrorCode::NoConvergence, "phase marching exceeded the step budget");
    }
    h = std::min({h, h_max, phi_max - x});
    if (h < 1e-14 * a) {
      if (y[0] < 1e-6 * a * a) break;  // flattened onto f = 0 (m = 1/2 case)
      fail(ErrorCode::StepUnderflow, "phase marching step collapsed");
    }
    Vec2 y_new, err;
    dp_step(rhs_phi, x, y, h, y_new, err);
    if (!std::isfinite(y_new[0]) || !std::isfinite(y_new[1]) || y_new[0] <= 0.0) {
      h *= 0.5;
      continue;
    }
    const double en = error_norm(err, y, y_new, abs_scale, cfg.rel_tol);
    if (en > 1.0) {
      h *= next_step_factor(en);
      continue;
    }
    x += h;
    y = y_new;
    record_node(out, x, y[0], y[1]);
    h *= next_step_factor(en);
    if (can_fold && y[1] < 0.0 && y[0] < switch_f) {
      fold = true;
      break;
    }
    if (y[0] < floor_f) break;
  }

  if (!fold) {
    out.termination = (x >= phi_max * (1.0 - 1e-15) - 1e-15 * a)
                          ? PhaseTermination::Completed
                          : PhaseTermination::Truncated;
    return out;
  }

  // Fold descent: re-parametrise by s = f, state (phi, g = f fdot), and land
  // exactly on s = 0 where f^2 ~ c_z (phi_zero - phi).
  const auto rhs_fold = [mu](double s, const Vec2& v) -> Vec2 {
    return {s / v[1], mu * s * s / v[1] - v[0]};
  };
  double s = y[0];
  Vec2 u = {x, y[0] * y[1]};
  const Vec2 abs_scale_fold = {cfg.abs_tol * a, cfg.abs_tol * a * a * a};
  double hs = -s / 16.0;
  steps = 0;
  while (s > 0.0) {
    if (++steps > kMaxSteps) {
      fail(ErrorCode::NoConvergence, "fold descent exceeded the step budget");
    }
    hs = -std::min(-hs, s);
    Vec2 u_new, err;
    dp_step(rhs_fold, s, u, hs, u_new, err);
    if (!std::isfinite(u_new[0]) || !std::isfinite(u_new[1]) || u_new[1] >= 0.0) {
      hs *= 0.5;
      if (-hs < 1e-18 * a * a) {
        fail(ErrorCode::StepUnderflow, "fold descent step collapsed");
      }
      continue;
    }
    const double en = error_norm(err, u, u_new, abs_scale_fold, cfg.rel_tol);
    if (en > 1.0) {
      hs *= next_step_factor(en);
      continue;
    }
    s += hs;
    u = u_new;
    if (s > 0.0) {
      record_node(out, u[0], s, u[1] / s);
    }
    hs *= next_step_factor(en);
  }
  out.termination = PhaseTermination::BranchPoint;
  out.phi_zero = u[0];
  out.c_z = -2.0 * u[1];
  record_node(out, u[0], 0.0, -std::numeric_limits<double>::infinity());
  return out;
}

// ---------------------------------------------------------------------------
// Cross-checks
// ---------------------------------------------------------------------------

PhaseConsistencyReport phase_consistency_check(const bvp::ShootResult& shoot,
                                               const PhaseProfile& profile) {
  if (!(shoot.m == profile.m) || shoot.a != profile.a) {
    fail(ErrorCode::DomainError,
         "time-domain and phase solutions describe different problems");
  }
  const Regime regime = classify_regime(shoot.m);
  if (regime == Regime::NoBvpSolution || regime == Regime::PoleBoundedBvp) {
    fail(ErrorCode::RegimeUnsupported,
         "slope consistency check requires m >= 1/2");
  }

  const double a = shoot.a;
  const Profile right = bvp::extend_right(shoot);

  // Left reconstruction down to twice the phase launch offset.
  const double t_front = (profile.phi_min() + a) / a;
  const double tau_left = std::log(2.0 * t_front * a / shoot.d) / a;
  integrator::IntegrationSpec spec;
  spec.m = shoot.m;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-14;
  spec.events = {integrator::Event::stop_at(tau_left)};
  const integrator::OdeState origin{0.0, 0.0, shoot.phi0_prime,
                                    shoot.phi0_dprime};
  const Profile left =
      integrator::integrate(origin, integrator::Direction::Left, spec);

  PhaseConsistencyReport report;
  report.phi_lo = std::numeric_limits<double>::infinity();
  report.phi_hi = -std::numeric_limits<double>::infinity();
  const int n_side = 300;
  for (const Profile* prof : {&left, &right}) {
    const double t0 = prof->tau_front();
    const double t1 = prof->tau_back();
    for (int i = 0; i <= n_side; ++i) {
      const double tau = std::clamp(t0 + (t1 - t0) * i / n_side, t0, t1);
      const Triple state = prof->eval(tau);
      if (state.phi < profile.phi_min() || state.phi > profile.phi_max()) {
        continue;
      }
      const double dev = std::abs(profile.eval(state.phi) - state.dphi);
      report.max_abs_dev = std::max(report.max_abs_dev, dev);
      report.phi_lo = std::min(report.phi_lo, state.phi);
      report.phi_hi = std::max(report.phi_hi, state.phi);
      ++report.samples;
    }
  }
  if (report.samples == 0) {
    fail(ErrorCode::OutOfDomain,
         "phase profile does not overlap the time-domain trajectory");
  }
  return report;
}

PhaseScalingReport phase_scaling_check(const MValue& m, double a) {
  check_amplitude(a);
  const double span = 4.0;
  const PhaseProfile unit = solve_phase_cp(m, 1.0, span);
  const PhaseProfile scaled = solve_phase_cp(m, a, span * a);

  const double lo = std::max(unit.phi_min(), scaled.phi_min() / a) + 1e-3;
  const double hi = std::min(unit.phi_max(), scaled.phi_max() / a) - 1e-3;
  if (!(hi > lo)) {
    fail(ErrorCode::OutOfDomain, "scaled phase profiles do not overlap");
  }
  PhaseScalingReport report;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double psi = lo + (hi - lo) * i / n;
    const double f_unit = unit.eval(psi);
    const double f_scaled = scaled.eval(a * psi);
    const double dev =
        std::abs(f_scaled - a * a * f_unit) / (a * a * (1.0 + std::abs(f_unit)));
    report.max_rel_dev = std::max(report.max_rel_dev, dev);
    ++report.samples;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Far field
// ---------------------------------------------------------------------------

namespace {

double farfield_m_checked(const MValue& m) {
  if (m.is_infinite() || !(m.value() > 0.5)) {
    fail(ErrorCode::RegimeUnsupported,
         "algebraic far field requires 1/2 < m < infinity");
  }
  return m.value();
}

}  // namespace

double farfield_B(const MValue& m, double b) {
  const double mv = farfield_m_checked(m);
  if (!(std::isfinite(b) && b > 0.0)) {
    fail(ErrorCode::DomainError, "far-field coefficient b must be positive");
  }
  return mv * std::pow(b, 1.0 / mv);
}

double farfield_c1(const MValue& m, double B) {
  const double mv = farfield_m_checked(m);
  return B * (mv - 1.0) * (mv - 2.0) / (mv * (mv + 1.0));
}

double farfield_c2(const MValue& m, double B) {
  const double mv = farfield_m_checked(m);
  return 3.0 * B * B * (mv - 1.0) * (mv - 2.0) * (3.0 - mv) /
         (2.0 * mv * mv * (mv + 1.0) * (mv + 1.0));
}

double farfield_kappa1(const MValue& m) {
  const double mv = farfield_m_checked(m);
  return -(2.0 * mv * mv + 4.0 * mv - 4.0) / (mv * (mv + 1.0));
}

namespace {

constexpr double kTailC1 = 1e-3;
constexpr double kTailC2 = 1e-6;

double farfield_eval(double mv, double B, double phi) {
  const double beta = (mv - 1.0) / mv;
  const double x = std::pow(phi, (mv + 1.0) / mv);
  const double c1 = B * (mv - 1.0) * (mv - 2.0) / (mv * (mv + 1.0));
  const double c2 = 3.0 * B * B * (mv - 1.0) * (mv - 2.0) * (3.0 - mv) /
                    (2.0 * mv * mv * (mv + 1.0) * (mv + 1.0));
  if (std::abs(c1) / x > kTailC1 || std::abs(c2) / (x * x) > kTailC2) {
    fail(ErrorCode::FarFieldNotReached,
         "phi too small for the truncated far-field form");
  }
  return B * std::pow(phi, beta) * (1.0 + c1 / x + c2 / (x * x));
}

}  // namespace

double phase_farfield(const MValue& m, double b, double phi) {
  const double mv = farfield_m_checked(m);
  const double B = farfield_B(m, b);
  if (!(std::isfinite(phi) && phi > 0.0)) {
    fail(ErrorCode::DomainError, "far-field evaluation requires phi > 0");
  }
  return farfield_eval(mv, B, phi);
}

double farfield_fit_B(const PhaseProfile& profile) {
  const double mv = farfield_m_checked(profile.m);
  if (profile.phi.empty() || profile.phi.back() <= 0.0) {
    fail(ErrorCode::FarFieldNotReached, "phase profile has no far-field tail");
  }
  const double phi = profile.phi.back();
  const double f = profile.f.back();
  const double beta = (mv - 1.0) / mv;
  const double x = std::pow(phi, (mv + 1.0) / mv);
  double B = f / std::pow(phi, beta);
  for (int iter = 0; iter < 64; ++iter) {
    const double c1 = B * (mv - 1.0) * (mv - 2.0) / (mv * (mv + 1.0));
    const double c2 = 3.0 * B * B * (mv - 1.0) * (mv - 2.0) * (3.0 - mv) /
                      (2.0 * mv * mv * (mv + 1.0) * (mv + 1.0));
    const double B_next =
        f / (std::pow(phi, beta) * (1.0 + c1 / x + c2 / (x * x)));
    if (!std::isfinite(B_next) || !(B_next > 0.0)) {
      fail(ErrorCode::NoConvergence, "far-field fit iteration diverged");
    }
    const double shift = std::abs(B_next - B);
    B = B_next;
    if (shift <= 1e-15 * B) break;
  }
  // The fit is only meaningful where the truncated form itself is admissible.
  farfield_eval(mv, B, phi);
  return B;
}

// ---------------------------------------------------------------------------
// Power-law ansatz reductions
// ---------------------------------------------------------------------------

double AnsatzFamily::dphi_dtau(double phi, double C) const {
  return phi * phi * ((C / A_c) * std::pow(std::abs(phi), A_c) - B_c / A_c);
}

std::array<AnsatzFamily, 4> linear_ansatz_families() {
  return {AnsatzFamily{1.0 / 3.0, -1.5, -1.0}, AnsatzFamily{0.5, -2.0, -1.0},
          AnsatzFamily{1.0, -2.0, 0.0}, AnsatzFamily{2.0, -1.5, 0.0}};
}

}  // namespace mixlayer::phase
