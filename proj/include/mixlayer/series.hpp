// Coefficient recurrences and series evaluators used by the solvers:
//  - the exponential stable-manifold (Lyapunov) series for phi near tau=-inf,
//  - the stable-initial-manifold (SIM) relations rho1, rho2 in phi'',
//  - the algebraic far-field correction v(xi) for m>1/2,
//  - the phase-plane chi series of f(phi) near the equilibrium,
//  - the phase-plane far-field theta series (Case I asymptotics).
// All evaluators report tail estimates so callers can enforce accuracy.
#pragma once

#include "mixlayer/core_types.hpp"

#include <vector>

namespace mixlayer::series {

inline constexpr int kDefaultLyapunovOrder = 12;
inline constexpr int kDefaultSimOrder = 12;
inline constexpr int kDefaultFarfieldOrder = 8;
inline constexpr int kDefaultChiOrder = 8;
inline constexpr int kDefaultThetaOrder = 8;

// Warn when |d e^{a tau}| exceeds this; refuse (finite m) when it reaches 1.
inline constexpr double kLyapunovWarnArg = 0.1;

// ---------------------------------------------------------------------------
// phi(tau) = -a + sum_{l>=1} h_l d^l e^{l a tau}, h_1 = 1.
struct LyapunovCoeffs {
  MValue m = MValue::finite(1.0);
  double a = 1.0;
  std::vector<double> h;  // h[0] unused, h[1..order]

  int order() const { return static_cast<int>(h.size()) - 1; }
};

LyapunovCoeffs lyapunov_coeffs(const MValue& m, double a, int order);

struct SeriesEval {
  double phi = 0.0;
  double dphi = 0.0;
  double ddphi = 0.0;
  double tail_estimate = 0.0;
  bool warn_large_argument = false;  // |d e^{a tau}| > 0.1
};

SeriesEval eval_lyapunov(const LyapunovCoeffs& c, double d, double tau);

// Closed-form tails of the conservation-identity integrals over (-inf, -T]:
//   i0 = integral of (phi')^2 dt, i1 = integral of t*(phi')^2 dt.
struct TailIntegrals {
  double i0 = 0.0;
  double i1 = 0.0;
};

TailIntegrals lyapunov_tail_integrals(const LyapunovCoeffs& c, double d, double T);

// ---------------------------------------------------------------------------
// Stable initial manifold: with y = phi''(-T),
//   phi(-T) + a = rho1(y) = sum b_k y^k,  phi'(-T) = rho2(y) = sum c_k y^k.
struct SimCoeffs {
  MValue m = MValue::finite(1.0);
  double a = 1.0;
  std::vector<double> b_coef;  // [0] unused
  std::vector<double> c_coef;  // [0] unused

  int order() const { return static_cast<int>(c_coef.size()) - 1; }
};

SimCoeffs sim_coeffs(const MValue& m, double a, int order);

struct TransferConditions {
  double phi = 0.0;   // phi(-T)
  double dphi = 0.0;  // phi'(-T)
  double tail_estimate = 0.0;
};

// Truncates rho1, rho2 at approx_order (1 or 2). Throws TailTooLarge when the
// first neglected term exceeds tail_tol.
TransferConditions sim_transfer_conditions(const SimCoeffs& c, double y, int approx_order,
                                           double tail_tol);

// Residuals of the defining manifold ODEs at y, using the truncated series;
// used to verify the recurrences to O(y^{order+1}).
struct SimResidual {
  double r1 = 0.0;
  double r2 = 0.0;
};
SimResidual sim_defining_residual(const SimCoeffs& c, double y);

// ---------------------------------------------------------------------------
// Far-field correction for m>1/2: phi ~ (tau+tau_s)^m [b + v(xi)],
// xi = (tau+tau_s)^{m+1}/(m+1), v(xi) = sum_{k>=1} v_k xi^{-k}.
struct FarfieldCoeffs {
  double m = 1.0;
  double b = 1.0;
  std::vector<double> v;  // [0] unused

  int order() const { return static_cast<int>(v.size()) - 1; }
};

FarfieldCoeffs farfield_coeffs(double m, double b, int order);

// Asymptotic evaluation with optimal truncation (stops before the first term
// that grows in magnitude). Derivatives are with respect to xi.
struct FarfieldEval {
  double v = 0.0;
  double dv = 0.0;
  double ddv = 0.0;
  double dddv = 0.0;
  double last_term = 0.0;
  int terms_used = 0;
};

FarfieldEval eval_farfield(const FarfieldCoeffs& c, double xi);

// phi, phi', phi'' of the far-field form at tau (p = tau + tau_s > 0).
Triple eval_farfield_phi(const FarfieldCoeffs& c, double tau_s, double tau);

// Residual of the third-order far-field ODE in v at xi with the truncated
// series; decays one power of xi faster per added term.
double farfield_ode_residual(const FarfieldCoeffs& c, double xi);

// ---------------------------------------------------------------------------
// Phase-plane series near the equilibrium: f(phi) = a^2 t (1 + chi(t)),
// t = (phi+a)/a, chi(t) = sum_{k>=1} chi_k t^k. Coefficients depend on m only.
struct PhaseChiCoeffs {
  double m = 1.0;
  std::vector<double> chi;  // [0] unused

  int order() const { return static_cast<int>(chi.size()) - 1; }
};

PhaseChiCoeffs phase_chi_coeffs(double m, int order);

double eval_chi(const PhaseChiCoeffs& c, double t);
double eval_chi_deriv(const PhaseChiCoeffs& c, double t);  // d chi / d t

// ---------------------------------------------------------------------------
// Phase-plane far-field theta series (Case I): with x = phi^{(m+1)/m},
//   f = B phi^{(m-1)/m} [1 + theta(x)],  theta(x) = sum_{k>=1} theta_k x^{-k}.
// theta_1, theta_2 have closed forms; higher coefficients come from formal
// substitution of the series into the governing ODE via truncated
// power-series arithmetic.
struct ThetaCoeffs {
  double m = 1.0;
  double B = 1.0;
  std::vector<double> theta;  // [0] unused

  int order() const { return static_cast<int>(theta.size()) - 1; }
};

ThetaCoeffs theta_coeffs(double m, double B, int order);

double eval_theta(const ThetaCoeffs& c, double x);
double eval_theta_deriv(const ThetaCoeffs& c, double x);  // d theta / d x

// Residual of the theta ODE at x with the truncated series (for order sweeps).
double theta_ode_residual(const ThetaCoeffs& c, double x);

}  // namespace mixlayer::series
