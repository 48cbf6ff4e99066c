#pragma once

#include "mixlayer/core_types.hpp"

#include <functional>

namespace mixlayer::exact {

// Closed-form solution families of the profile equation. Regular kinds carry
// an axis shift tau_s; singular kinds carry their pole position tau_p.
enum class ExactFamily {
  Tanh,         // m = 1/2:  a tanh(a(tau - tau_s)/2)
  Linear,       // m = 1:    a (tau - tau_s)
  Quadratic,    // m = 2:    a (tau - tau_s)^2
  Exponential,  // m = inf:  a (exp(a(tau - tau_s)) - 1)
  Implicit13,   // m = 1/3:  bounded family given by an implicit relation
  BlowupPole,   // any m:    6m / [(m+1)(tau - tau_p)]
  BlowupCoth,   // m = 1/2:  a coth(a(tau - tau_p)/2)
};

const char* exact_family_name(ExactFamily f);

struct ExactKind {
  ExactFamily family = ExactFamily::Tanh;
  MValue m = MValue::finite(0.5);
  double a = 1.0;      // amplitude parameter (BlowupPole ignores it)
  double shift = 0.0;  // tau_s for regular kinds, tau_p for singular kinds

  static ExactKind tanh_profile(double a, double tau_s = 0.0);
  static ExactKind linear(double a, double tau_s = 0.0);
  static ExactKind quadratic(double a, double tau_s = 0.0);
  static ExactKind exponential(double a, double tau_s = 0.0);
  // Shift convention such that lyapunov_parameter(implicit13(a, 0)) equals
  // 2*sqrt(3)*a*exp(sqrt(3)*pi/3).
  static ExactKind implicit13(double a, double tau_s = 0.0);
  // Normalization used by the bounded boundary-value solution: the peak
  // (phi = 0, phi' = 0) sits at tau = 0.
  static ExactKind implicit13_bvp(double a);
  static ExactKind blowup_pole(const MValue& m, double tau_p = 0.0);
  static ExactKind blowup_coth(double a, double tau_p = 0.0);

  bool is_singular() const;
  // Pole position for BlowupPole/BlowupCoth/Implicit13; throws DomainError
  // for the globally regular kinds.
  double pole_tau() const;
};

// Exact values and analytic derivatives. Throws UndefinedAtPole exactly at a
// pole and OutOfDomain where the implicit m=1/3 family is not defined.
Triple eval_exact(const ExactKind& kind, double tau);

// Analytic third derivative, for residual checks.
double eval_exact_dddphi(const ExactKind& kind, double tau);

// Bounded m=1/3 solution with the peak at tau = 0: solves the implicit
// relation for phi at the given tau < tau_p = 2*pi*sqrt(3)/(3a).
double eval_implicit_13(double a, double tau);

// The implicit relation itself, parametrized by u = sqrt(-phi):
// branch 1 is the rising part (tau <= 0), branch 2 the falling part.
double implicit13_tau(double a, double u, int branch);

// Stable-manifold amplitude d such that phi ~ -a + d e^{a tau} as tau -> -inf
// (negative for BlowupCoth, which approaches the equilibrium from below).
// Throws NoManifoldForm for Linear/Quadratic/BlowupPole.
double lyapunov_parameter(const ExactKind& kind);

// Closed-form flow fields of the three physical presets.
enum class PresetName { FloodedJet, Separation, NearWallJet };

const char* preset_name_str(PresetName name);

struct FlowFormulas {
  PresetName name = PresetName::FloodedJet;
  MValue m = MValue::finite(0.5);
  double a = 1.0;
  double nu = 1.0;
  std::function<double(double, double)> u;
  std::function<double(double, double)> v;
  std::function<double(double, double)> psi;
};

FlowFormulas preset_problem(PresetName name, double a, double nu);

}  // namespace mixlayer::exact
