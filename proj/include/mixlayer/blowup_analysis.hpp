#pragma once

// Local structure of blow-up solutions near a pole.
//
// Near a simple pole at tau_p every solution behaves like
//
//   phi(tau) = 6m / [(m+1)(tau - tau_p)] * (1 + Y(|tau - tau_p|)),
//
// where the correction Y vanishes at the pole and its principal term is an
// eigenfunction of the linearized operator.  The eigenvalue cubic
//
//   lambda^3 - 6 lambda^2/(m+1) + lambda (5m-1)/(m+1) + 6 = 0
//
// always has the root lambda = -1; the remaining quadratic factor
// lambda^2 - lambda (m+7)/(m+1) + 6 switches from a real pair to a complex
// pair at the parameter m1 = (-17 + 12*sqrt(6))/23, the positive root of
// kappa(m) = 23 m^2 + 34 m - 25.  This header classifies that structure,
// evaluates the principal two-parameter local family, and provides the exact
// Bernoulli-number series available in the m = 1/2 case.

#include <optional>
#include <vector>

#include "mixlayer/core_types.hpp"

namespace mixlayer::blowup {

// Positive root of kappa(m) = 23 m^2 + 34 m - 25, the boundary between the
// oscillatory and power-pair local regimes.
double m1_constant();

// kappa(m) = 23 m^2 + 34 m - 25 (discriminant switch of the local pair).
double kappa(double m);

// Residual of the eigenvalue cubic at lambda; identically zero eigenvalues
// of the local linearization make this vanish.
double cubic_residual(double m, double lambda);

enum class PoleRegime {
  ComplexPair,  // m > m1: Y ~ x^alpha [C1 cos(beta ln x) + C2 sin(beta ln x)]
  DoubleRoot,   // m = m1: Y ~ x^alpha [C1 + C2 ln x]
  RealPair,     // m < m1: Y ~ C1 x^lambda1 + C2 x^lambda2
};

const char* pole_regime_name(PoleRegime regime);

// Classification of the local blow-up family at a pole for one m.
struct PoleLocalForm {
  double m = 0.0;
  PoleRegime regime = PoleRegime::ComplexPair;
  // Real part of the pair (equals the mean of the real pair).
  double alpha = 0.0;
  // Imaginary part; present only for the complex-pair regime.
  std::optional<double> beta;
  // The real pair, lambda1 >= lambda2 > 0; present only for real regimes
  // (both equal alpha at the double root).
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  // Third eigenvalue of the cubic, always -1.
  double lambda3 = -1.0;
  // The regime boundary constant, carried for reporting.
  double m1_const = 0.0;
};

// Classifies the local blow-up structure for m > 0.  Within 1e-9 of the
// boundary constant the discriminant is below noise and the double-root
// form is reported.
PoleLocalForm pole_local_form(double m);

// Evaluates the principal-approximation blow-up family
//   phi = 6m / [(m+1)(tau - tau_p)] * (1 + Y(|tau - tau_p|))
// with Y per the regime of m.  Valid only near the pole: requires
// 0 < |tau - tau_p| <= radius.  The default radius is a heuristic cut-off
// keeping the neglected higher-order terms small in cross-checks.
// Throws: UndefinedAtPole at tau == tau_p, OutsideLocalRadius beyond radius.
double blowup_local_eval(double m, double tau_p, double c1, double c2,
                         double tau, double radius = 0.5);

// First n_max + 1 Bernoulli numbers B_0..B_n_max (B_1 = -1/2 convention),
// computed by the standard recurrence.
std::vector<double> bernoulli_numbers(int n_max);

// Exact correction factor for the m = 1/2 blow-up family:
//   Y(x) = (a x / 2) coth(a x / 2) - 1,
// evaluated in closed form (series-stabilized near x = 0).
double coth_y12(double a, double x);

// Bernoulli-number series for the same correction,
//   Y = sum_{n>=1} D_n (C2(a) x^2)^n,  C2(a) = a^2 / 12,
//   D_n = 3^n 4^n B_{2n} / (2n)!,
// truncated after `order` terms.  Requires (a x)^2 < pi^2 (convergence
// window); order in [1, 20].
// Throws: OutOfWindow outside the window, DomainError for a bad order.
double bernoulli_series_y12(double a, double x, int order);

}  // namespace mixlayer::blowup
