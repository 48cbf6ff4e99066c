#include "mixlayer/bvp_solver.hpp"

#include "mixlayer/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <utility>

namespace mixlayer::bvp {

using integrator::Direction;
using integrator::Event;
using integrator::IntegrationSpec;
using integrator::OdeState;

namespace {

// Unit-amplitude shooting bracket: the sub/super-solution families pin d_m(1)
// inside [1, 2] for m >= 1/2 and inside [2, 8.58] for 1/3 <= m < 1/2.
constexpr double kD13Unit = 8.579306;  // 2 sqrt(3) e^{sqrt(3) pi / 6}

constexpr int kQuadPanels = 4000;

bool is_one_third(const MValue& m) {
  return !m.is_infinite() && m.value() == 1.0 / 3.0;
}

IntegrationSpec base_spec(const MValue& m, const ShootConfig& cfg) {
  IntegrationSpec is;
  is.m = m;
  is.rel_tol = cfg.rel_tol;
  is.abs_tol = cfg.abs_tol;
  is.max_step = cfg.max_step;
  return is;
}

OdeState manifold_state(const series::LyapunovCoeffs& coeffs, double d, double tau) {
  const auto s = series::eval_lyapunov(coeffs, d, tau);
  return {tau, s.phi, s.dphi, s.ddphi};
}

// Simpson quadrature of f over [lo, hi] sampled through dense output.
double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (hi <= lo) return 0.0;
  if (n % 2 != 0) ++n;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Shooting residual, strictly increasing in d:
//   m >= 1/2:      phi(0; d)                      (origin value)
//   1/3 < m < 1/2: -tau at the first zero of phi  (crossing time)
//   m = 1/3:       -tau at the first zero of phi' (tangency time)
double shoot_residual(const series::LyapunovCoeffs& coeffs, double d, double T_run,
                      const ShootConfig& cfg, Regime regime) {
  IntegrationSpec is = base_spec(coeffs.m, cfg);
  const bool crossing_mode = regime == Regime::PoleBoundedBvp;
  if (!crossing_mode) {
    is.events = {Event::stop_at(0.0), Event::pole_guard()};
  } else if (is_one_third(coeffs.m)) {
    is.events = {Event::dphi_zero(), Event::pole_guard()};
  } else {
    is.events = {Event::phi_zero(), Event::pole_guard()};
  }
  const Profile p = integrator::integrate(manifold_state(coeffs, d, -T_run),
                                          Direction::Right, is);
  if (p.termination.kind == TerminationKind::PoleAt) {
    fail(ErrorCode::PoleBeforeOrigin,
         "trial trajectory with d = " + std::to_string(d) +
             " blows up before reaching the shooting target");
  }
  if (p.termination.kind != TerminationKind::Completed) {
    fail(ErrorCode::NoConvergence, "trial trajectory triggered no event (d = " +
                                       std::to_string(d) + ")");
  }
  return crossing_mode ? -p.tau_back() : p.phi.back();
}

void check_sign_conditions(const ShootResult& r) {
  const double a = r.a;
  const double slack = 1e-6 * std::max(1.0, a * a * a);
  const Regime regime = classify_regime(r.m);
  bool ok = true;
  if (regime == Regime::PoleBoundedBvp) {
    ok = r.phi0_dprime < slack && r.phi0_prime > -slack;
  } else if (regime == Regime::FloodedJetBoundary) {
    ok = std::fabs(r.phi0_dprime) < slack;
  } else {
    ok = r.phi0_prime > a * a / 2.0 - slack && r.phi0_dprime > -slack;
  }
  if (!ok) {
    fail(ErrorCode::NoConvergence,
         "converged data at the origin violate the regime sign conditions");
  }
}

// Appends a continuation run that starts at dst's last sample.
void append_profile(Profile& dst, const Profile& more) {
  for (std::size_t i = 1; i < more.size(); ++i) {
    dst.tau.push_back(more.tau[i]);
    dst.phi.push_back(more.phi[i]);
    dst.dphi.push_back(more.dphi[i]);
    dst.ddphi.push_back(more.ddphi[i]);
  }
  dst.segments.insert(dst.segments.end(), more.segments.begin(), more.segments.end());
  dst.termination = more.termination;
}

OdeState last_state(const Profile& p) {
  return {p.tau.back(), p.phi.back(), p.dphi.back(), p.ddphi.back()};
}

double far_field_xi_hat(const Profile& p, double m) {
  const double tb = p.tau_back();
  if (tb <= 0.0 || p.phi.back() <= 0.0) return 0.0;
  const double b_hat = p.phi.back() / std::pow(tb, m);
  return b_hat * std::pow(tb, m + 1.0) / (m + 1.0);
}

}  // namespace

void ShootConfig::validate() const {
  if (!(T >= 5.0 && T <= 50.0)) {
    fail(ErrorCode::DomainError, "handoff cutoff T must lie in [5, 50]");
  }
  if (series_order < 4 || series_order > 60) {
    fail(ErrorCode::DomainError, "series_order must lie in [4, 60]");
  }
  if (!(target_tol > 0.0) || !(rel_tol > 0.0) || !(abs_tol > 0.0) ||
      rel_tol > 1e-2 || abs_tol > 1e-2) {
    fail(ErrorCode::DomainError, "tolerances must be positive and at most 1e-2");
  }
  if (!(max_step > 0.0)) fail(ErrorCode::DomainError, "max_step must be positive");
  if (max_iter < 10) fail(ErrorCode::DomainError, "max_iter must be at least 10");
  if (!(farfield_xi >= 10.0)) {
    fail(ErrorCode::DomainError, "farfield_xi must be at least 10");
  }
  if (tau_max < 0.0) fail(ErrorCode::DomainError, "tau_max must be nonnegative");
}

ShootResult shoot_left_bvp(const MValue& m, double a, const ShootConfig& cfg) {
  cfg.validate();
  if (!(a > 0.0) || !std::isfinite(a)) {
    fail(ErrorCode::DomainError, "amplitude a must be positive");
  }
  const Regime regime = classify_regime(m);
  if (regime == Regime::NoBvpSolution) {
    fail(ErrorCode::RegimeUnsupported,
         "no boundary-value solution exists for 0 < m < 1/3 (m = " + m.str() + ")");
  }

  const double T_run = cfg.T / a;
  const auto coeffs = series::lyapunov_coeffs(m, a, cfg.series_order);

  double d = a;  // exact in the infinite limit
  int evals = 0;
  if (!m.is_infinite()) {
    auto g = [&](double dd) {
      ++evals;
      return shoot_residual(coeffs, dd, T_run, cfg, regime);
    };
    double lo = 0.98 * a;
    double hi = (regime == Regime::PoleBoundedBvp ? 1.05 * kD13Unit : 2.1) * a;
    double glo = g(lo), ghi = g(hi);
    for (int widen = 0; (glo > 0.0 || ghi < 0.0) && widen < 3; ++widen) {
      if (glo > 0.0) {
        lo *= 0.5;
        glo = g(lo);
      }
      if (ghi < 0.0) {
        hi *= 2.0;
        ghi = g(hi);
      }
    }
    if (glo > 0.0 || ghi < 0.0) {
      fail(ErrorCode::NoConvergence, "shooting bracket does not straddle the target");
    }
    // Bracketed hybrid: secant candidate when it falls safely inside,
    // bisection otherwise.
    double d_prev = lo, g_prev = glo, d_cur = hi, g_cur = ghi;
    while (hi - lo > 1e-13 * std::max(1.0, hi)) {
      if (evals >= cfg.max_iter) {
        fail(ErrorCode::NoConvergence, "shooting search exceeded max_iter");
      }
      double cand = 0.5 * (lo + hi);
      if (g_cur != g_prev) {
        const double sec = d_cur - g_cur * (d_cur - d_prev) / (g_cur - g_prev);
        const double pad = 0.01 * (hi - lo);
        if (sec > lo + pad && sec < hi - pad) cand = sec;
      }
      const double gc = g(cand);
      d_prev = d_cur;
      g_prev = g_cur;
      d_cur = cand;
      g_cur = gc;
      if (gc == 0.0) {
        lo = hi = cand;
        break;
      }
      (gc < 0.0 ? lo : hi) = cand;
      (gc < 0.0 ? glo : ghi) = gc;
    }
    d = 0.5 * (lo + hi);
  }

  // Measurement run to the origin at the converged amplitude.
  IntegrationSpec is = base_spec(m, cfg);
  is.events = {Event::stop_at(0.0), Event::pole_guard()};
  const Profile p =
      integrator::integrate(manifold_state(coeffs, d, -T_run), Direction::Right, is);
  if (p.termination.kind != TerminationKind::Completed) {
    fail(ErrorCode::PoleBeforeOrigin, "converged trajectory failed to reach the origin");
  }

  ShootResult r;
  r.m = m;
  r.a = a;
  r.d = d;
  r.phi0_prime = p.dphi.back();
  r.phi0_dprime = p.ddphi.back();
  r.residual = std::fabs(p.phi.back());
  r.T_used = T_run;
  if (r.residual > cfg.target_tol * std::max(1.0, a * a)) {
    fail(ErrorCode::NoConvergence,
         "shooting residual " + std::to_string(r.residual) + " exceeds target_tol");
  }
  check_sign_conditions(r);
  return r;
}

Profile extend_right(const ShootResult& result, const ShootConfig& cfg) {
  cfg.validate();
  const MValue& m = result.m;
  const double a = result.a;
  const auto coeffs = series::lyapunov_coeffs(m, a, cfg.series_order);
  const OdeState start = manifold_state(coeffs, result.d, -result.T_used);
  const Regime regime = classify_regime(m);

  IntegrationSpec is = base_spec(m, cfg);
  if (regime == Regime::PoleBoundedBvp) {
    is.events = {Event::pole_guard()};
    return integrator::integrate(start, Direction::Right, is);
  }

  double target;
  if (cfg.tau_max > 0.0) {
    target = cfg.tau_max;
  } else if (regime == Regime::FloodedJetBoundary) {
    target = 20.0 / a;  // the profile is within e^{-20} of its limit there
  } else if (regime == Regime::SeparationLimit) {
    target = 12.0 / a;  // exponential growth; stay well below the blow-up guard
  } else {
    target = 12.0 / a;  // first look; extended below until the far field is clean
  }

  is.events = {Event::stop_at(target), Event::pole_guard()};
  Profile out = integrator::integrate(start, Direction::Right, is);

  if (regime == Regime::GlobalIbvp && cfg.tau_max == 0.0) {
    const double mval = m.value();
    const double cap = 400.0 / a;
    for (int iter = 0; iter < 12; ++iter) {
      if (far_field_xi_hat(out, mval) >= 1.05 * cfg.farfield_xi) break;
      const double tb = out.tau_back();
      if (tb >= cap) break;
      const double b_hat = out.phi.back() / std::pow(tb, mval);
      double next = tb * 2.0;
      if (b_hat > 0.0) {
        next = std::pow((mval + 1.0) * 1.15 * cfg.farfield_xi / b_hat,
                        1.0 / (mval + 1.0));
      }
      next = std::min(std::max(next, tb * 1.2), cap);
      is.events = {Event::stop_at(next), Event::pole_guard()};
      append_profile(out, integrator::integrate(last_state(out), Direction::Right, is));
    }
  }
  return out;
}

FarFieldFit extract_farfield_fit(const Profile& profile, double m,
                                 const ShootConfig& cfg) {
  cfg.validate();
  if (!(m > 0.5) || !std::isfinite(m)) {
    fail(ErrorCode::RegimeUnsupported,
         "far-field coefficient exists only for finite m > 1/2");
  }
  if (profile.size() < 4 || profile.segments.empty()) {
    fail(ErrorCode::DomainError, "far-field fit needs a dense profile");
  }
  const double tau_max = profile.tau_back();
  if (far_field_xi_hat(profile, m) < cfg.farfield_xi) {
    fail(ErrorCode::FarFieldNotReached,
         "profile ends before the algebraic far field dominates");
  }

  const int K = 30;
  const double lo = 0.6 * tau_max;
  std::vector<double> taus(K), data(K);
  for (int j = 0; j < K; ++j) {
    taus[j] = lo + (tau_max - lo) * j / (K - 1);
    data[j] = profile.eval(taus[j]).phi;
  }

  double b = profile.phi.back() / std::pow(tau_max, m);
  double ts = 0.0;

  auto residuals = [&](double bb, double tss, std::vector<double>& r) -> double {
    const auto fc = series::farfield_coeffs(m, bb, series::kDefaultFarfieldOrder);
    double ss = 0.0;
    for (int j = 0; j < K; ++j) {
      r[j] = data[j] - series::eval_farfield_phi(fc, tss, taus[j]).phi;
      ss += r[j] * r[j];
    }
    return ss;
  };

  std::vector<double> r(K), rb(K), rt(K);
  double ss = residuals(b, ts, r);
  for (int iter = 0; iter < 60; ++iter) {
    const double db = 1e-6 * std::max(std::fabs(b), 1e-3);
    const double dt = 1e-6;
    residuals(b + db, ts, rb);
    residuals(b, ts + dt, rt);
    // J columns: d(model)/d(b), d(model)/d(ts) = -(d r / d parameter).
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    for (int j = 0; j < K; ++j) {
      const double jb = -(rb[j] - r[j]) / db;
      const double jt = -(rt[j] - r[j]) / dt;
      a11 += jb * jb;
      a12 += jb * jt;
      a22 += jt * jt;
      g1 += jb * r[j];
      g2 += jt * r[j];
    }
    const double det = a11 * a22 - a12 * a12;
    if (!(std::fabs(det) > 1e-300)) break;
    double step_b = (a22 * g1 - a12 * g2) / det;
    double step_t = (a11 * g2 - a12 * g1) / det;
    bool accepted = false;
    for (int halve = 0; halve < 12; ++halve) {
      const double bn = b + step_b, tn = ts + step_t;
      if (bn > 0.0 && taus.front() + tn > 0.0) {
        const double ssn = residuals(bn, tn, rb);
        if (ssn <= ss) {
          b = bn;
          ts = tn;
          ss = ssn;
          r = rb;
          accepted = true;
          break;
        }
      }
      step_b *= 0.5;
      step_t *= 0.5;
    }
    if (!accepted || (std::fabs(step_b) < 1e-13 * std::max(1.0, std::fabs(b)) &&
                      std::fabs(step_t) < 1e-12)) {
      break;
    }
  }

  FarFieldFit fit;
  fit.b = b;
  fit.tau_s = ts;
  fit.samples = K;
  double acc = 0.0;
  for (int j = 0; j < K; ++j) {
    const double scale = std::pow(taus[j] + ts, m);
    acc += (r[j] / scale) * (r[j] / scale);
  }
  fit.spread = std::sqrt(acc / K);
  return fit;
}

double extract_b(const Profile& profile, double m, const ShootConfig& cfg) {
  return extract_farfield_fit(profile, m, cfg).b;
}

Triple IbvpSolution::eval(double tau) const {
  const double s = a * tau;
  Triple t;
  if (s < base_profile.tau_front()) {
    const auto e = series::eval_lyapunov(manifold, base.d, s);
    t = {e.phi, e.dphi, e.ddphi};
  } else if (s <= base_profile.tau_back()) {
    t = base_profile.eval(s);
  } else {
    t = series::eval_farfield_phi(farfield, fit.tau_s, s);
  }
  return {a * t.phi, a * a * t.dphi, a * a * a * t.ddphi};
}

IbvpSolution solve_ibvp(double m, double b_target, const ShootConfig& cfg) {
  const MValue mv = MValue::finite(m);
  if (classify_regime(mv) != Regime::GlobalIbvp) {
    fail(ErrorCode::RegimeUnsupported,
         "the two-parameter problem is solvable only for finite m > 1/2");
  }
  if (!(b_target > 0.0) || !std::isfinite(b_target)) {
    fail(ErrorCode::DomainError, "b must be positive");
  }
  IbvpSolution sol;
  sol.m = mv;
  sol.b_target = b_target;
  sol.base = shoot_left_bvp(mv, 1.0, cfg);
  sol.base_profile = extend_right(sol.base, cfg);
  sol.fit = extract_farfield_fit(sol.base_profile, m, cfg);
  sol.b1 = sol.fit.b;
  sol.base.b_extracted = sol.b1;
  sol.a = std::pow(b_target / sol.b1, 1.0 / (m + 1.0));
  sol.d = sol.a * sol.base.d;
  sol.manifold = series::lyapunov_coeffs(mv, 1.0, cfg.series_order);
  sol.farfield = series::farfield_coeffs(m, sol.b1, series::kDefaultFarfieldOrder);
  return sol;
}

IdentityReport verify_integral_identities(const ShootResult& result,
                                          const Profile& profile,
                                          const ShootConfig& cfg) {
  cfg.validate();
  const double T = result.T_used;
  if (!profile.covers(-T) || !profile.covers(0.0)) {
    fail(ErrorCode::DomainError, "profile must cover [-T, 0]");
  }
  const double a = result.a;
  const double kappa = result.m.integral_coeff();
  const auto coeffs = series::lyapunov_coeffs(result.m, a, cfg.series_order);
  const auto tail = series::lyapunov_tail_integrals(coeffs, result.d, T);

  auto dp2 = [&](double t) {
    const double dp = profile.eval(t).dphi;
    return dp * dp;
  };
  IdentityReport rep;
  rep.i0 = tail.i0 + simpson(dp2, -T, 0.0, kQuadPanels);
  rep.i1 = tail.i1 + simpson([&](double t) { return t * dp2(t); }, -T, 0.0, kQuadPanels);

  const Triple origin = profile.eval(0.0);
  rep.dphi0 = origin.dphi;
  rep.ddphi0 = origin.ddphi;
  rep.ddphi_rel = std::fabs(rep.ddphi0 - kappa * rep.i0) / (a * a * a);
  rep.dphi_rel = std::fabs(rep.dphi0 - (a * a / 2.0 - kappa * rep.i1)) / (a * a);
  return rep;
}

InflectionReport inflection_point(const ShootResult& result, const Profile& profile,
                                  const ShootConfig& cfg) {
  cfg.validate();
  if (classify_regime(result.m) != Regime::PoleBoundedBvp) {
    fail(ErrorCode::RegimeUnsupported,
         "an interior inflection point exists only for 1/3 <= m < 1/2");
  }
  IntegrationSpec is = base_spec(result.m, cfg);
  const double tau_in = integrator::locate_event(profile, Event::ddphi_zero(), is);

  const double a = result.a;
  const double T = result.T_used;
  const auto coeffs = series::lyapunov_coeffs(result.m, a, cfg.series_order);
  const auto tail = series::lyapunov_tail_integrals(coeffs, result.d, T);
  const double i0 =
      tail.i0 + simpson(
                    [&](double t) {
                      const double dp = profile.eval(t).dphi;
                      return dp * dp;
                    },
                    -T, tau_in, kQuadPanels);

  const Triple at = profile.eval(tau_in);
  InflectionReport rep;
  rep.tau_in = tau_in;
  rep.identity_rel =
      std::fabs(at.phi * at.dphi - result.m.integral_coeff() * i0) / (a * a * a);
  return rep;
}

double d_table(const MValue& m, const ShootConfig& cfg) {
  static std::mutex mu;
  static std::map<double, double> cache;
  const double key =
      m.is_infinite() ? std::numeric_limits<double>::infinity() : m.value();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double d = shoot_left_bvp(m, 1.0, cfg).d;
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, d);
  return d;
}

double b_table(const MValue& m, const ShootConfig& cfg) {
  if (m.is_infinite()) return 0.0;  // limit of the decaying tail of the table
  if (classify_regime(m) != Regime::GlobalIbvp) {
    fail(ErrorCode::RegimeUnsupported,
         "far-field coefficient exists only for m > 1/2");
  }
  static std::mutex mu;
  static std::map<double, double> cache;
  const double key = m.value();
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const ShootResult r = shoot_left_bvp(m, 1.0, cfg);
  const Profile p = extend_right(r, cfg);
  const double b = extract_b(p, m.value(), cfg);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, b);
  return b;
}

}  // namespace mixlayer::bvp
