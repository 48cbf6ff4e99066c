// Shooting solver for the singular boundary-value problem on the left
// half-line: pick the stable-manifold amplitude d so the profile crosses
// phi = 0 exactly at tau = 0, extend the converged trajectory rightward,
// extract the far-field growth coefficient b, and use the exact scaling
// group to solve the two-parameter problem for given (m, b).
#pragma once

#include "mixlayer/core_types.hpp"
#include "mixlayer/series.hpp"

#include <optional>

namespace mixlayer::bvp {

struct ShootConfig {
  // Series handoff point: integration starts at tau = -T/a so the manifold
  // series argument d e^{a tau} is uniformly small for every amplitude.
  double T = 7.0;
  int series_order = 12;
  double target_tol = 1e-10;  // |phi(0)| accepted at the converged d
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double max_step = 0.5;
  int max_iter = 200;         // residual evaluations in the d search
  // Far-field handoff: the fit window must satisfy b xi >= farfield_xi so the
  // exponentially small correction is below double precision.
  double farfield_xi = 40.0;
  double tau_max = 0.0;       // right extension target; 0 = choose adaptively

  void validate() const;  // throws DomainError on out-of-range settings
};

// Converged shoot: the amplitude d plus the measured data at tau = 0.
struct ShootResult {
  MValue m = MValue::finite(1.0);
  double a = 1.0;
  double d = 0.0;
  double phi0_prime = 0.0;   // phi'(0)
  double phi0_dprime = 0.0;  // phi''(0)
  std::optional<double> b_extracted;
  std::optional<double> tau_pole;
  double residual = 0.0;     // |phi(0)| at the converged d
  double T_used = 7.0;       // actual left cutoff (T/a)
};

// Solves the half-line problem by a bracketed bisection/secant search on d.
// The residual is phi(0;d) for m >= 1/2, the first zero-crossing time for
// 1/3 < m < 1/2, and the tangency (peak) time at m = 1/3. Throws
// RegimeUnsupported for m < 1/3, NoConvergence when the search stalls,
// PoleBeforeOrigin if a trial trajectory blows up left of the origin.
ShootResult shoot_left_bvp(const MValue& m, double a, const ShootConfig& cfg = {});

// Re-integrates the converged trajectory from tau = -T rightward:
//   m in [1/3,1/2): until the pole (termination PoleAt),
//   m = 1/2:        to tau_max (profile flattens toward a),
//   m > 1/2:        far enough that the algebraic far field dominates
//                   (adaptive unless cfg.tau_max > 0),
//   m = inf:        to a fixed right edge (exponential growth).
Profile extend_right(const ShootResult& result, const ShootConfig& cfg = {});

// Joint least-squares fit of the far-field amplitude b and the nuisance
// shift tau_s over the window [0.6 tau_back, tau_back] of the profile.
struct FarFieldFit {
  double b = 0.0;
  double tau_s = 0.0;
  double spread = 0.0;  // RMS of the fit residual expressed in units of b
  int samples = 0;
};

FarFieldFit extract_farfield_fit(const Profile& profile, double m,
                                 const ShootConfig& cfg = {});

// Convenience wrapper returning just b. Throws FarFieldNotReached when the
// profile does not extend far enough for the fit window to be asymptotic.
double extract_b(const Profile& profile, double m, const ShootConfig& cfg = {});

// Solution of the two-parameter problem (m, b): the unit-amplitude profile
// plus the scaling a = (b / b_m(1))^{1/(m+1)}, evaluated anywhere on the line
// through the stored profile and its series tails.
struct IbvpSolution {
  MValue m = MValue::finite(1.0);
  double b_target = 0.0;
  double a = 0.0;
  double d = 0.0;   // manifold amplitude of the scaled solution, a * d_m(1)
  double b1 = 0.0;  // unit-amplitude far-field coefficient b_m(1)
  ShootResult base;          // unit-amplitude shoot
  Profile base_profile;      // unit-amplitude trajectory [-T, tau_max]
  FarFieldFit fit;           // far-field fit of the base profile
  series::LyapunovCoeffs manifold;  // left tail of the base profile
  series::FarfieldCoeffs farfield;  // right tail of the base profile

  // phi, phi', phi'' of the scaled solution at tau; uses the stored profile
  // where it covers a*tau and the series tails beyond it.
  Triple eval(double tau) const;
};

IbvpSolution solve_ibvp(double m, double b_target, const ShootConfig& cfg = {});

// Conservation identities at the origin, checked by quadrature over the
// profile plus the closed-form series tail over (-inf, -T]:
//   phi''(0) = [(2m-1)/m] I0,           I0 = int_{-inf}^0 (phi')^2
//   phi'(0)  = a^2/2 - [(2m-1)/m] I1,   I1 = int_{-inf}^0 s (phi')^2 ds
struct IdentityReport {
  double dphi0 = 0.0;     // measured phi'(0)
  double ddphi0 = 0.0;    // measured phi''(0)
  double i0 = 0.0;        // tail + quadrature
  double i1 = 0.0;
  double ddphi_rel = 0.0; // |phi''(0) - rhs| / a^3
  double dphi_rel = 0.0;  // |phi'(0) - rhs| / a^2
};

IdentityReport verify_integral_identities(const ShootResult& result,
                                          const Profile& profile,
                                          const ShootConfig& cfg = {});

// Location of the inflection point (phi'' = 0) for 1/3 <= m < 1/2 and the
// residual of the identity phi(t_in) phi'(t_in) = [(2m-1)/m] I0(t_in),
// normalized by a^3.
struct InflectionReport {
  double tau_in = 0.0;
  double identity_rel = 0.0;
};

InflectionReport inflection_point(const ShootResult& result, const Profile& profile,
                                  const ShootConfig& cfg = {});

// Unit-amplitude table values d_m(1) and b_m(1), memoized per m (thread-safe
// for concurrent sweeps; all callers in a run must use the same cfg).
// b_table returns 0 in the infinite limit and throws RegimeUnsupported for
// m <= 1/2, where no far-field coefficient exists.
double d_table(const MValue& m, const ShootConfig& cfg = {});
double b_table(const MValue& m, const ShootConfig& cfg = {});

}  // namespace mixlayer::bvp
