#pragma once
// Phase-plane representation of the layer profile: along any trajectory the
// slope is a single-valued function f(phi) = phi' of the profile value, and f
// satisfies the second-order equation
//
//     f f'' + (f')^2 + phi f' - mu f = 0,   mu = (m-1)/m,   ' = d/dphi,
//
// with the one-parameter family of admissible curves leaving the rest state
// phi = -a tangentially: f(-a) = 0, f'(-a) = a.  Because time shifts drop out,
// the phase curve is an invariant of the whole trajectory family for a given
// amplitude a; it is the natural object for consistency checks against the
// time-domain solver and for far-field slope asymptotics.
//
// This module provides:
//   * the local series f = a(phi+a) [1 + sum_k chi_k ((phi+a)/a)^k] used to
//     launch the integration off the degenerate rest point,
//   * a marching solver in phi (switching to f as the independent variable
//     near a fold, where f -> 0 with f' -> -inf, so the square-root branch
//     point is resolved cleanly),
//   * far-field evaluation f ~ B phi^{(m-1)/m} (1 + c1/x + c2/x^2),
//     x = phi^{(m+1)/m}, with a fit of B from a computed profile,
//   * the closed-form catalogue of power-law ansatz reductions, and
//   * consistency/scaling checks used by the test-suite and the CLI.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mixlayer/core_types.hpp"
#include "mixlayer/bvp_solver.hpp"

namespace mixlayer::phase {

// --------------------------------------------------------------------------
// Local series at the rest point
// --------------------------------------------------------------------------

// Coefficients chi_1..chi_order of the tangent series
//   f(phi) = a (phi+a) [1 + sum_{k>=1} chi_k t^k],  t = (phi+a)/a,
// for amplitude a = 1 (the coefficients are amplitude-independent).
// chi_1 = -1/(4m); the remainder follow from a quadratic recurrence.
// For m = 1/2 the series terminates: chi = -t/2 exactly.  For m = infinity
// all coefficients vanish and f = a(phi+a) exactly.
std::vector<double> chi_coefficients(const MValue& m, int order);

// Evaluate the tangent series at a given phi (phi >= -a; accuracy degrades as
// (phi+a)/a approaches 1).
double phase_series_eval(const MValue& m, double a, double phi, int order);

// Residual of the phase-plane equation at a point, given f and its first two
// phi-derivatives: f*fddot + fdot^2 + phi*fdot - mu*f.  Zero along any
// solution; used by tests to validate closed forms.
double phase_ode_residual(const MValue& m, double phi, double f, double fdot,
                          double fddot);

// --------------------------------------------------------------------------
// Marching solver
// --------------------------------------------------------------------------

struct PhaseConfig {
  // Launch offset: integration starts at phi = -a + delta*a using the series.
  double delta = 1e-3;
  // Series truncation order used for the launch values.
  int series_order = 8;
  // Local error tolerances for the adaptive embedded pair.
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  // Maximum step in phi, in units of a (controls sample density; the stored
  // nodes support interpolation between them).
  double max_dphi = 0.05;
  // Below f < switch_f * a^2 with f decreasing (only possible for m < 1/2),
  // the solver re-parametrises by f to land exactly on the fold.
  double switch_f = 1e-2;
  // For m >= 1/2 the curve may flatten towards f = 0 from above without a
  // fold (m = 1/2 exactly); marching stops once f < floor_f * a^2.
  double floor_f = 1e-9;

  void validate() const;  // throws Error(ErrorCode::DomainError)
};

enum class PhaseTermination {
  Completed,    // reached phi_max
  BranchPoint,  // f reached 0 at finite phi_zero with square-root contact
  Truncated     // f decayed below the floor without a fold (m >= 1/2)
};

const char* phase_termination_name(PhaseTermination t);

struct PhaseProfile {
  MValue m = MValue::finite(1.0);
  double a = 1.0;
  PhaseTermination termination = PhaseTermination::Completed;

  // Sample nodes: strictly increasing phi, with f > 0 in the interior and
  // fdot = df/dphi.  For a BranchPoint run the final node has f = 0.
  std::vector<double> phi;
  std::vector<double> f;
  std::vector<double> fdot;

  // Branch-point data (only meaningful when termination == BranchPoint):
  // f^2 ~ c_z * (phi_zero - phi) as phi -> phi_zero^-.
  std::optional<double> phi_zero;
  std::optional<double> c_z;

  // Interpolated slope at phi (cubic Hermite between nodes; square-root
  // interpolation of f^2 across the fold segment).  phi must lie within
  // [phi.front(), phi.back()]; throws Error(ErrorCode::OutOfDomain) otherwise.
  double eval(double phi_query) const;

  double phi_min() const { return phi.front(); }
  double phi_max() const { return phi.back(); }
};

// March the phase curve of amplitude a (a > 0) from the rest point up to
// phi_max (> -a).  m may be any positive regime value or infinite.
PhaseProfile solve_phase_cp(const MValue& m, double a, double phi_max,
                            const PhaseConfig& cfg = {});

// --------------------------------------------------------------------------
// Cross-checks
// --------------------------------------------------------------------------

struct PhaseConsistencyReport {
  double max_abs_dev = 0.0;  // max |f(phi) - phi'| over the sampled overlap
  double phi_lo = 0.0;       // overlap window actually sampled
  double phi_hi = 0.0;
  int samples = 0;
};

// Compare a time-domain solution (same m and amplitude) against a phase
// profile: reconstructs the trajectory through the origin state of `shoot`,
// samples (phi(tau), phi'(tau)) on both sides, and evaluates the phase curve
// at the same phi.  Requires m >= 1/2 (monotone-slope regimes).
PhaseConsistencyReport phase_consistency_check(const bvp::ShootResult& shoot,
                                               const PhaseProfile& profile);

struct PhaseScalingReport {
  double max_rel_dev = 0.0;
  int samples = 0;
};

// Verify the exact scale equivariance f(phi; a) = a^2 f(phi/a; 1) by solving
// at amplitude a and at amplitude 1 and comparing on a shared grid.
PhaseScalingReport phase_scaling_check(const MValue& m, double a);

// --------------------------------------------------------------------------
// Far field (1/2 < m < infinity)
// --------------------------------------------------------------------------

// Leading far-field slope coefficient B = m b^(1/m) for growth rate b.
double farfield_B(const MValue& m, double b);

// First- and second-order correction coefficients of the far-field expansion
//   f = B phi^{(m-1)/m} [1 + c1/x + c2/x^2],   x = phi^{(m+1)/m}:
//   c1 = B (m-1)(m-2) / [m(m+1)]
//   c2 = 3 B^2 (m-1)(m-2)(3-m) / [2 m^2 (m+1)^2]
// (both vanish at m = 1 and m = 2, where the truncation is exact).
double farfield_c1(const MValue& m, double B);
double farfield_c2(const MValue& m, double B);

// Decay rate of the neglected exponentially small term relative to the
// algebraic tail: kappa1 = -(2m^2 + 4m - 4)/[m(m+1)].
double farfield_kappa1(const MValue& m);

// Evaluate the two-correction far-field form at phi (> 0).  Throws
// Error(ErrorCode::FarFieldNotReached) when phi is too small for the
// truncated series to be trustworthy (|c1|/x > 1e-3 or |c2|/x^2 > 1e-6);
// Error(ErrorCode::RegimeUnsupported) unless 1/2 < m < infinity.
double phase_farfield(const MValue& m, double b, double phi);

// Fit B from the last node of a computed profile by inverting the
// two-correction form (fixed-point iteration).  The profile must extend far
// enough that its endpoint passes the same far-field admissibility test.
double farfield_fit_B(const PhaseProfile& profile);

// --------------------------------------------------------------------------
// Power-law ansatz reductions
// --------------------------------------------------------------------------

// Substituting f*f' + phi*f = Psi(F), F = f*f', with linear Psi = A_c*F + B_c
// collapses the phase equation to a first-order ODE.  Exactly four parameter
// triples (m, A_c, B_c) admit this reduction; each yields
//   dphi/dtau = phi^2 [ (C/A_c) |phi|^{A_c} - B_c/A_c ]
// with C a constant of integration.
struct AnsatzFamily {
  double m;
  double A_c;
  double B_c;
  // Right-hand side of the reduced first-order equation at profile value phi
  // with integration constant C.
  double dphi_dtau(double phi, double C) const;
};

// The complete catalogue, ordered by increasing m:
//   (1/3, -3/2, -1), (1/2, -2, -1), (1, -2, 0), (2, -3/2, 0).
std::array<AnsatzFamily, 4> linear_ansatz_families();

}  // namespace mixlayer::phase
