#include "mixlayer/series.hpp"

#include <algorithm>
#include <cmath>

namespace mixlayer::series {

namespace {

// Neumaier compensated accumulator; keeps table reproduction stable.
struct Accum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double get() const { return sum + comp; }
};

void check_order(int order) {
  if (order < 1) {
    fail(ErrorCode::DomainError, "series order must be >= 1");
  }
}

void check_a(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    fail(ErrorCode::DomainError, "a must be positive");
  }
}

// --- minimal truncated power-series arithmetic (used for theta) -------------
using Poly = std::vector<double>;  // coefficient i belongs to s^i

Poly poly_mul(const Poly& p, const Poly& q, std::size_t trunc) {
  Poly r(trunc + 1, 0.0);
  for (std::size_t i = 0; i < p.size() && i <= trunc; ++i) {
    if (p[i] == 0.0) continue;
    const std::size_t jmax = std::min(q.size() - 1, trunc - i);
    for (std::size_t j = 0; j <= jmax; ++j) {
      r[i + j] += p[i] * q[j];
    }
  }
  return r;
}

void poly_axpy(Poly& acc, const Poly& p, double scale) {
  if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) acc[i] += scale * p[i];
}

// (1+p)^{-1} - 1 for p with zero constant term.
Poly poly_inv1(const Poly& p, std::size_t trunc) {
  Poly r(trunc + 1, 0.0);  // accumulates sum_{i>=1} (-p)^i via Horner
  for (std::size_t i = 0; i < trunc; ++i) {
    Poly shifted = r;
    shifted[0] += 1.0;
    r = poly_mul(shifted, p, trunc);
    for (double& c : r) c = -c;
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lyapunov series

LyapunovCoeffs lyapunov_coeffs(const MValue& m, double a, int order) {
  check_order(order);
  check_a(a);
  LyapunovCoeffs c;
  c.m = m;
  c.a = a;
  c.h.assign(order + 1, 0.0);
  c.h[1] = 1.0;
  if (m.is_infinite()) {
    return c;  // the manifold family is exactly exponential: h_l = 0, l >= 2
  }
  const double mu = m.quad_coeff();  // (m-1)/m
  for (int l = 2; l <= order; ++l) {
    Accum s;
    for (int k = 1; k <= l - 1; ++k) {
      s.add(k * (mu * (l - k) - k) * c.h[k] * c.h[l - k]);
    }
    c.h[l] = s.get() / (a * static_cast<double>(l) * l * (l - 1));
  }
  return c;
}

SeriesEval eval_lyapunov(const LyapunovCoeffs& c, double d, double tau) {
  const double a = c.a;
  const double q = d * std::exp(a * tau);
  SeriesEval out;
  out.warn_large_argument = std::abs(q) > kLyapunovWarnArg;

  if (c.m.is_infinite()) {
    // Single exact term; no convergence wall applies.
    out.phi = -a + q;
    out.dphi = a * q;
    out.ddphi = a * a * q;
    out.tail_estimate = 0.0;
    return out;
  }
  if (std::abs(q) >= 1.0) {
    fail(ErrorCode::DivergenceSuspected,
         "|d e^{a tau}| = " + std::to_string(std::abs(q)) + " >= 1; series argument too large");
  }

  Accum s0, s1, s2;
  double ql = 1.0;
  double prev_term = 0.0, last_term = 0.0;
  const int order = c.order();
  for (int l = 1; l <= order; ++l) {
    ql *= q;
    const double t0 = c.h[l] * ql;
    const double la = l * a;
    s0.add(t0);
    s1.add(la * t0);
    s2.add(la * la * t0);
    prev_term = last_term;
    last_term = std::abs(t0) * std::max(1.0, la * la);
  }
  if (order >= 2 && last_term > prev_term && last_term > 1e-300) {
    fail(ErrorCode::DivergenceSuspected,
         "series terms growing at truncation order; argument outside convergence range");
  }
  out.phi = -a + s0.get();
  out.dphi = s1.get();
  out.ddphi = s2.get();
  const double r = std::abs(q);
  out.tail_estimate = last_term * (r < 0.5 ? 2.0 * r : r / (1.0 - r));
  return out;
}

TailIntegrals lyapunov_tail_integrals(const LyapunovCoeffs& c, double d, double T) {
  // (phi')^2 = a^2 sum_{n>=2} S_n d^n e^{n a t}, S_n = sum_{l+k=n} l k h_l h_k,
  // integrated termwise over (-inf, -T].
  const double a = c.a;
  const int order = c.order();
  TailIntegrals out;
  if (c.m.is_infinite()) {
    // phi' = a d e^{a t}: S_2 = 1 only.
    const double e = d * d * std::exp(-2.0 * a * T);
    out.i0 = a * a * e / (2.0 * a);
    out.i1 = a * a * e * (-T / (2.0 * a) - 1.0 / (4.0 * a * a));
    return out;
  }
  Accum i0, i1;
  for (int n = 2; n <= 2 * order; ++n) {
    Accum sn;
    for (int l = std::max(1, n - order); l <= std::min(order, n - 1); ++l) {
      sn.add(l * (n - l) * c.h[l] * c.h[n - l]);
    }
    const double S = sn.get();
    if (S == 0.0) continue;
    const double na = n * a;
    const double w = a * a * S * std::pow(d, n) * std::exp(-na * T);
    i0.add(w / na);
    i1.add(w * (-T / na - 1.0 / (na * na)));
  }
  out.i0 = i0.get();
  out.i1 = i1.get();
  return out;
}

// ---------------------------------------------------------------------------
// Stable initial manifold

SimCoeffs sim_coeffs(const MValue& m, double a, int order) {
  check_order(order);
  check_a(a);
  SimCoeffs c;
  c.m = m;
  c.a = a;
  c.b_coef.assign(order + 1, 0.0);
  c.c_coef.assign(order + 1, 0.0);
  c.c_coef[1] = 1.0 / a;
  c.b_coef[1] = 1.0 / (a * a);
  if (m.is_infinite()) {
    return c;  // the manifold is exactly linear in the limit
  }
  const double mu = m.quad_coeff();
  auto& b = c.b_coef;
  auto& cc = c.c_coef;
  for (int k = 2; k <= order; ++k) {
    Accum sc, sb;
    for (int l = 1; l <= k - 1; ++l) {
      sc.add(l * cc[l] * b[k - l]);
      sb.add(l * b[l] * b[k - l]);
      for (int s = 1; s <= k - l; ++s) {
        const double ccc = cc[s] * cc[k - l - s + 1];
        sc.add(-mu * l * cc[l] * ccc);
        sb.add(-mu * l * b[l] * ccc);
      }
    }
    cc[k] = sc.get() / (a * k);
    sb.add(cc[k]);
    b[k] = sb.get() / (a * k);
  }
  return c;
}

TransferConditions sim_transfer_conditions(const SimCoeffs& c, double y, int approx_order,
                                           double tail_tol) {
  if (approx_order != 1 && approx_order != 2) {
    fail(ErrorCode::DomainError, "transfer conditions support approx_order 1 or 2");
  }
  TransferConditions out;
  double rho1 = 0.0, rho2 = 0.0, yk = 1.0;
  const int avail = c.order();
  const int o = std::min(approx_order, avail);
  for (int k = 1; k <= o; ++k) {
    yk *= y;
    rho1 += c.b_coef[k] * yk;
    rho2 += c.c_coef[k] * yk;
  }
  out.phi = -c.a + rho1;
  out.dphi = rho2;
  if (avail >= approx_order + 1) {
    const double ynext = yk * y;
    out.tail_estimate = 2.0 * std::max(std::abs(c.b_coef[approx_order + 1] * ynext),
                                       std::abs(c.c_coef[approx_order + 1] * ynext));
  } else {
    out.tail_estimate = std::abs(yk * y);  // crude fallback
  }
  if (out.tail_estimate > tail_tol) {
    fail(ErrorCode::TailTooLarge,
         "manifold series truncation estimate " + std::to_string(out.tail_estimate) +
             " exceeds tolerance " + std::to_string(tail_tol));
  }
  return out;
}

SimResidual sim_defining_residual(const SimCoeffs& c, double y) {
  // rho1' * [a y + mu rho2^2 - rho1 y] = rho2
  // rho2' * [a y + mu rho2^2 - rho1 y] = y
  double rho1 = 0.0, rho2 = 0.0, drho1 = 0.0, drho2 = 0.0;
  double yk = 1.0;
  for (int k = 1; k <= c.order(); ++k) {
    drho1 += k * c.b_coef[k] * yk;
    drho2 += k * c.c_coef[k] * yk;
    yk *= y;
    rho1 += c.b_coef[k] * yk;
    rho2 += c.c_coef[k] * yk;
  }
  const double mu = c.m.quad_coeff();
  const double G = c.a * y + mu * rho2 * rho2 - rho1 * y;
  return SimResidual{drho1 * G - rho2, drho2 * G - y};
}

// ---------------------------------------------------------------------------
// Far-field correction series

FarfieldCoeffs farfield_coeffs(double m, double b, int order) {
  check_order(order);
  if (!(m > 0.0) || !std::isfinite(m)) {
    fail(ErrorCode::DomainError, "far-field series needs finite m > 0");
  }
  if (b == 0.0 || !std::isfinite(b)) {
    fail(ErrorCode::DomainError, "far-field series needs nonzero b");
  }
  FarfieldCoeffs c;
  c.m = m;
  c.b = b;
  c.v.assign(order + 1, 0.0);
  const double m1 = m + 1.0;
  const double mu = (m - 1.0) / m;
  c.v[1] = -(m - 1.0) * (m - 2.0) / (m1 * m1);
  for (int k = 1; k + 1 <= order; ++k) {
    const double A = k * (k + 1.0) * (k + 2.0) - (6.0 * m / m1) * k * (k + 1.0) +
                     ((7.0 * m - 4.0) * m / (m1 * m1)) * k -
                     m * (m - 1.0) * (m - 2.0) / (m1 * m1 * m1);
    Accum nl;
    for (int l = 1; l <= k; ++l) {
      nl.add(l * (l + 1.0 - (m + 2.0) / m1 - mu * (k - l + 1.0)) * c.v[l] * c.v[k - l + 1]);
    }
    const double denom = b * (k + 1.0) * (k + 2.0 - (m + 2.0) / m1);
    c.v[k + 1] = (A * c.v[k] - nl.get()) / denom;
  }
  return c;
}

namespace {

// Sums exactly n terms of the asymptotic series and its xi-derivatives.
FarfieldEval farfield_sum(const FarfieldCoeffs& c, double xi, int n, bool optimal) {
  FarfieldEval e;
  Accum v, dv, ddv, dddv;
  double prev = std::numeric_limits<double>::infinity();
  const double xinv = 1.0 / xi;
  double xk = 1.0;
  for (int k = 1; k <= n; ++k) {
    xk *= xinv;
    const double term = c.v[k] * xk;
    if (optimal && std::abs(term) > prev && k > 1) break;
    v.add(term);
    dv.add(-k * term * xinv);
    ddv.add(k * (k + 1.0) * term * xinv * xinv);
    dddv.add(-k * (k + 1.0) * (k + 2.0) * term * xinv * xinv * xinv);
    prev = std::abs(term);
    e.last_term = term;
    e.terms_used = k;
  }
  e.v = v.get();
  e.dv = dv.get();
  e.ddv = ddv.get();
  e.dddv = dddv.get();
  return e;
}

}  // namespace

FarfieldEval eval_farfield(const FarfieldCoeffs& c, double xi) {
  if (!(xi > 0.0)) {
    fail(ErrorCode::OutOfDomain, "far-field series requires xi > 0");
  }
  return farfield_sum(c, xi, c.order(), /*optimal=*/true);
}

Triple eval_farfield_phi(const FarfieldCoeffs& c, double tau_s, double tau) {
  const double p = tau + tau_s;
  if (!(p > 0.0)) {
    fail(ErrorCode::OutOfDomain, "far-field form requires tau + tau_s > 0");
  }
  const double m = c.m;
  const double xi = std::pow(p, m + 1.0) / (m + 1.0);
  const FarfieldEval e = eval_farfield(c, xi);
  const double bv = c.b + e.v;
  Triple t;
  t.phi = std::pow(p, m) * bv;
  t.dphi = m * std::pow(p, m - 1.0) * bv + std::pow(p, 2.0 * m) * e.dv;
  t.ddphi = m * (m - 1.0) * std::pow(p, m - 2.0) * bv +
            3.0 * m * std::pow(p, 2.0 * m - 1.0) * e.dv + std::pow(p, 3.0 * m) * e.ddv;
  return t;
}

double farfield_ode_residual(const FarfieldCoeffs& c, double xi) {
  const FarfieldEval e = farfield_sum(c, xi, c.order(), /*optimal=*/false);
  const double m = c.m;
  const double m1 = m + 1.0;
  const double mu = (m - 1.0) / m;
  const double b = c.b;
  const double src = m * (m - 1.0) * (m - 2.0) / (m1 * m1 * m1 * xi * xi * xi);
  return e.dddv + (6.0 * m / (m1 * xi) + b) * e.ddv +
         ((7.0 * m - 4.0) * m / (m1 * m1 * xi * xi) + (m + 2.0) * b / (m1 * xi)) * e.dv +
         src * e.v + src * b + e.v * e.ddv + (m + 2.0) / (m1 * xi) * e.v * e.dv -
         mu * e.dv * e.dv;
}

// ---------------------------------------------------------------------------
// Phase-plane chi series

PhaseChiCoeffs phase_chi_coeffs(double m, int order) {
  check_order(order);
  if (m == 0.0 || !std::isfinite(m)) {
    fail(ErrorCode::DomainError, "chi series needs finite m != 0");
  }
  PhaseChiCoeffs c;
  c.m = m;
  c.chi.assign(order + 1, 0.0);
  c.chi[1] = -1.0 / (4.0 * m);
  for (int k = 2; k <= order; ++k) {
    Accum s;
    s.add(-c.chi[k - 1] * (1.0 + m * (k - 1.0)) / m);
    for (int l = 1; l <= k - 1; ++l) {
      s.add(-(l * (k + 3.0) + 1.0) * c.chi[l] * c.chi[k - l]);
    }
    c.chi[k] = s.get() / ((k + 1.0) * (k + 1.0));
  }
  return c;
}

double eval_chi(const PhaseChiCoeffs& c, double t) {
  double r = 0.0;
  for (int k = c.order(); k >= 1; --k) r = (r + c.chi[k]) * t;
  return r;
}

double eval_chi_deriv(const PhaseChiCoeffs& c, double t) {
  double r = 0.0;
  for (int k = c.order(); k >= 2; --k) r = (r + k * c.chi[k]) * t;
  return r + c.chi[1];
}

// ---------------------------------------------------------------------------
// Phase-plane theta series

ThetaCoeffs theta_coeffs(double m, double B, int order) {
  check_order(order);
  if (!(m > 0.0) || !std::isfinite(m)) {
    fail(ErrorCode::DomainError, "theta series needs finite m > 0");
  }
  if (B == 0.0 || !std::isfinite(B)) {
    fail(ErrorCode::DomainError, "theta series needs nonzero B");
  }
  ThetaCoeffs c;
  c.m = m;
  c.B = B;
  c.theta.assign(order + 1, 0.0);

  const double m1 = m + 1.0;
  const double cexp = m / (B * m1);          // coefficient of theta' alone
  const double cd1 = (4.0 * m - 3.0) / m1;   // coefficient of theta'/x
  const double cz = (m - 1.0) * (m - 2.0) / (m1 * m1);  // theta/x^2 and source

  // Solve for theta_k order by order: the residual coefficient at s^{k+1}
  // (s = 1/x) contains theta_k only through the -k*theta_k*cexp contribution
  // of the theta' term, so theta_k = R_k / (k * cexp) with R_k evaluated at
  // theta_k = 0.
  const std::size_t P = static_cast<std::size_t>(order) + 1;  // truncation power
  for (int k = 1; k <= order; ++k) {
    Poly th(P + 1, 0.0);
    for (int j = 1; j < k; ++j) th[j] = c.theta[j];
    Poly dth(P + 1, 0.0), ddth(P + 1, 0.0);  // d/dx and d2/dx2 as series in s
    for (int j = 1; j < k; ++j) {
      if (static_cast<std::size_t>(j) + 1 <= P) dth[j + 1] = -j * c.theta[j];
      if (static_cast<std::size_t>(j) + 2 <= P) ddth[j + 2] = j * (j + 1.0) * c.theta[j];
    }
    Poly res(P + 1, 0.0);
    poly_axpy(res, ddth, 1.0);
    poly_axpy(res, dth, cexp);
    {
      Poly s1(2, 0.0);
      s1[1] = 1.0;
      poly_axpy(res, poly_mul(dth, s1, P), cd1);
      Poly s2(3, 0.0);
      s2[2] = 1.0;
      poly_axpy(res, poly_mul(th, s2, P), cz);
      res[2] += cz;  // inhomogeneous source
    }
    {
      const Poly inv1 = poly_inv1(th, P);
      poly_axpy(res, poly_mul(dth, inv1, P), cexp);
      Poly inv = inv1;
      inv[0] += 1.0;  // (1+theta)^{-1}
      poly_axpy(res, poly_mul(poly_mul(dth, dth, P), inv, P), 1.0);
    }
    const double Rk = res[k + 1];
    c.theta[k] = Rk / (k * cexp);
  }
  return c;
}

double eval_theta(const ThetaCoeffs& c, double x) {
  if (!(x > 0.0)) {
    fail(ErrorCode::OutOfDomain, "theta series requires x > 0");
  }
  double sum = 0.0, prev = std::numeric_limits<double>::infinity();
  double xk = 1.0;
  const double xinv = 1.0 / x;
  for (int k = 1; k <= c.order(); ++k) {
    xk *= xinv;
    const double term = c.theta[k] * xk;
    if (std::abs(term) > prev && k > 1) break;  // optimal truncation
    sum += term;
    prev = std::abs(term);
  }
  return sum;
}

double eval_theta_deriv(const ThetaCoeffs& c, double x) {
  if (!(x > 0.0)) {
    fail(ErrorCode::OutOfDomain, "theta series requires x > 0");
  }
  double sum = 0.0;
  double xk = 1.0 / x;
  const double xinv = 1.0 / x;
  for (int k = 1; k <= c.order(); ++k) {
    xk *= xinv;
    sum += -k * c.theta[k] * xk;
  }
  return sum;
}

double theta_ode_residual(const ThetaCoeffs& c, double x) {
  double th = 0.0, dth = 0.0, ddth = 0.0;
  const double xinv = 1.0 / x;
  double xk = 1.0;
  for (int k = 1; k <= c.order(); ++k) {
    xk *= xinv;
    const double t = c.theta[k] * xk;
    th += t;
    dth += -k * t * xinv;
    ddth += k * (k + 1.0) * t * xinv * xinv;
  }
  const double m = c.m;
  const double m1 = m + 1.0;
  const double cexp = m / (c.B * m1);
  const double cz = (m - 1.0) * (m - 2.0) / (m1 * m1);
  return ddth + dth * (cexp + (4.0 * m - 3.0) / (m1 * x)) + th * cz / (x * x) +
         cexp * dth * (1.0 / (1.0 + th) - 1.0) + dth * dth / (1.0 + th) + cz / (x * x);
}

}  // namespace mixlayer::series
