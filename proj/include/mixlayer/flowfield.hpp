#pragma once
// Physical-plane flow fields derived from a self-similar profile. A profile
// solution Phi(tau) of the similarity ODE induces, through
//
//   tau = sqrt(m/(nu (m+1))) y / x^{1/(m+1)},
//   u   = x^{(m-1)/(m+1)} Phi'(tau),
//   v   = sqrt(nu/(m (m+1))) x^{-1/(m+1)} [tau Phi'(tau) - m Phi(tau)],
//   psi = sqrt(nu (m+1)/m) x^{m/(m+1)} Phi(tau),
//
// a solenoidal velocity field (u, v) with stream function psi on the half
// plane x > 0. This module evaluates those fields on rectangular grids,
// traces streamlines dy/dx = v/u, extracts the jet diagnostics of the
// bounded preset, and emits the singular overlay lines of the pole-bounded
// regime. The exponential limit profile does not fit the finite-m mapping
// above and is handled through its closed forms only.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mixlayer/bvp_solver.hpp"
#include "mixlayer/core_types.hpp"
#include "mixlayer/exact_solutions.hpp"

namespace mixlayer::flow {

struct Polyline {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
};

// A solution handle that can be evaluated anywhere in the physical plane.
// Exactly one backing store is set: closed-form preset formulas, or a scaled
// two-parameter solution with series tails on both ends.
struct SimilaritySolution {
  MValue m = MValue::finite(1.0);
  double a = 1.0;
  double nu = 1.0;
  std::optional<double> b;
  std::optional<double> d;
  std::string source;

  std::shared_ptr<const exact::FlowFormulas> closed;
  std::shared_ptr<const bvp::IbvpSolution> ibvp;

  // Closed-form presets: bounded jet (m = 1/2), separation flow (limit case,
  // defined for x >= 0), near-wall jet (m = 1/3, defined above its pole line).
  static SimilaritySolution from_preset(exact::PresetName name, double a,
                                        double nu);
  // Two-parameter problem for 1/2 < m < infinity and far-field coefficient
  // b > 0; covers the whole plane x > 0.
  static SimilaritySolution from_ibvp(const MValue& m, double b, double nu,
                                      const bvp::ShootConfig& cfg = {});

  // Point evaluation; throws Error(OutOfDomain) outside the solution's
  // physical domain (x <= 0, or below the pole line of the near-wall jet).
  double u(double x, double y) const;
  double v(double x, double y) const;
  double psi(double x, double y) const;

  bool allows_x_zero() const;  // true only for the separation preset
};

struct FlowGridSpec {
  SimilaritySolution solution;
  double x_min = 1.0;
  double x_max = 2.0;
  int nx = 21;
  double y_min = -1.0;
  double y_max = 1.0;
  int ny = 21;

  void validate() const;  // throws Error(DomainError)
};

// Evaluated field. Values are stored per grid node, x-major:
// index(ix, iy) = ix * ny + iy. Cells outside the solution's domain are
// NaN-masked and counted rather than failing the whole grid.
struct FlowField {
  std::vector<double> x;  // nx axis values
  std::vector<double> y;  // ny axis values
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> psi;
  std::size_t masked = 0;
  std::string note;  // human-readable masking summary, empty when complete

  MValue m = MValue::finite(1.0);
  double a = 1.0;
  double nu = 1.0;
  std::optional<double> b;
  std::vector<Polyline> streamlines;

  std::size_t index(std::size_t ix, std::size_t iy) const {
    return ix * y.size() + iy;
  }
  double u_at(std::size_t ix, std::size_t iy) const { return u[index(ix, iy)]; }
  double v_at(std::size_t ix, std::size_t iy) const { return v[index(ix, iy)]; }
  double psi_at(std::size_t ix, std::size_t iy) const {
    return psi[index(ix, iy)];
  }
};

FlowField evaluate_field(const FlowGridSpec& spec);

// Integrates dy/dx = v/u rightward from the seed until the grid edge, the
// arc-length budget, or a stagnation of the horizontal motion (|u| ~ 0, where
// the slope field blows up; tracing is stopped there rather than continued
// around the turn). Throws Error(SeedOnStagnation) when u vanishes already at
// the seed point.
Polyline trace_streamline(const FlowGridSpec& spec, double x0, double y0,
                          double arc_limit);

// Velocity slices at fixed x stations over the grid's y axis, flattened as
// equal-length columns.
struct VelocityProfiles {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> u;
  std::vector<double> v;
};

VelocityProfiles velocity_profiles(const FlowGridSpec& spec,
                                   const std::vector<double>& x_values);

// Diagnostics of the bounded jet (m = 1/2 preset) at one x station:
//   y_zero: height where v changes sign (entrainment boundary),
//   y_vmax, v_max: location and value of the vertical-velocity maximum,
//   v_lim: closed-form limit of v as y -> infinity,
//   v_probe: v evaluated at the finite probe height for comparison.
struct FloodedJetRow {
  double x = 0.0;
  double y_zero = 0.0;
  double y_vmax = 0.0;
  double v_max = 0.0;
  double v_lim = 0.0;
  double v_probe = 0.0;
};

std::vector<FloodedJetRow> flooded_jet_table(double a, double nu,
                                             const std::vector<double>& xs,
                                             double y_probe = 70.0);

// Singular overlays of the pole-bounded regime 1/3 <= m < 1/2, in the
// reflected orientation used for the near-wall family of figures: the flow
// occupies the region above the pole line
//   y(x) = -tau_p sqrt(nu (m+1)/m) x^{1/(m+1)},
// and the horizontal velocity vanishes along the stagnation line of the same
// shape with tau_max (the slope zero of the profile) in place of tau_p.
struct SingularLines {
  double tau_p = 0.0;
  double tau_max = 0.0;
  Polyline pole_line;
  Polyline stagnation_line;
};

SingularLines singular_pole_line(const MValue& m, double a, double nu,
                                 const std::vector<double>& xs);

// Far-field coefficient of the horizontal velocity: u -> U0 y^{m-1} as
// y -> infinity at fixed x, with U0 = m b [m/((m+1) nu)]^{(m-1)/2}.
double farfield_u0(const MValue& m, double b, double nu);

}  // namespace mixlayer::flow
