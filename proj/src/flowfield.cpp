#include "mixlayer/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mixlayer/integrator.hpp"

namespace mixlayer::flow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_nu(double nu) {
  if (!(std::isfinite(nu) && nu > 0.0)) {
    fail(ErrorCode::DomainError, "kinematic viscosity nu must be positive");
  }
}

bool is_maskable(ErrorCode code) {
  return code == ErrorCode::OutOfDomain || code == ErrorCode::UndefinedAtPole;
}

// Horizontal stagnation threshold for streamline tracing.
bool stagnant(double u, double v) {
  return std::abs(u) <= 1e-12 * (1.0 + std::abs(v));
}

}  // namespace

// ---------------------------------------------------------------------------
// Solution handle
// ---------------------------------------------------------------------------

SimilaritySolution SimilaritySolution::from_preset(exact::PresetName name,
                                                   double a, double nu) {
  SimilaritySolution s;
  s.closed =
      std::make_shared<const exact::FlowFormulas>(exact::preset_problem(name, a, nu));
  s.m = s.closed->m;
  s.a = a;
  s.nu = nu;
  s.source = std::string("preset:") + exact::preset_name_str(name);
  return s;
}

SimilaritySolution SimilaritySolution::from_ibvp(const MValue& m, double b,
                                                 double nu,
                                                 const bvp::ShootConfig& cfg) {
  check_nu(nu);
  if (m.is_infinite()) {
    fail(ErrorCode::RegimeUnsupported,
         "the exponential limit flow is available as the separation preset");
  }
  auto sol = std::make_shared<const bvp::IbvpSolution>(
      bvp::solve_ibvp(m.value(), b, cfg));
  SimilaritySolution s;
  s.m = sol->m;
  s.a = sol->a;
  s.nu = nu;
  s.b = b;
  s.d = sol->d;
  s.ibvp = std::move(sol);
  s.source = "ibvp";
  return s;
}

bool SimilaritySolution::allows_x_zero() const {
  return closed && closed->name == exact::PresetName::Separation;
}

namespace {

double tau_of(const SimilaritySolution& s, double x, double y) {
  const double mv = s.m.value();
  return std::sqrt(mv / (s.nu * (mv + 1.0))) * y / std::pow(x, 1.0 / (mv + 1.0));
}

void check_x_positive(double x) {
  if (!(x > 0.0)) {
    fail(ErrorCode::OutOfDomain, "similarity flow fields require x > 0");
  }
}

}  // namespace

double SimilaritySolution::u(double x, double y) const {
  if (closed) return closed->u(x, y);
  check_x_positive(x);
  const double mv = m.value();
  const Triple t = ibvp->eval(tau_of(*this, x, y));
  return std::pow(x, (mv - 1.0) / (mv + 1.0)) * t.dphi;
}

double SimilaritySolution::v(double x, double y) const {
  if (closed) return closed->v(x, y);
  check_x_positive(x);
  const double mv = m.value();
  const double tau = tau_of(*this, x, y);
  const Triple t = ibvp->eval(tau);
  return std::sqrt(nu / (mv * (mv + 1.0))) * std::pow(x, -1.0 / (mv + 1.0)) *
         (tau * t.dphi - mv * t.phi);
}

double SimilaritySolution::psi(double x, double y) const {
  if (closed) return closed->psi(x, y);
  check_x_positive(x);
  const double mv = m.value();
  const Triple t = ibvp->eval(tau_of(*this, x, y));
  return std::sqrt(nu * (mv + 1.0) / mv) * std::pow(x, mv / (mv + 1.0)) * t.phi;
}

// ---------------------------------------------------------------------------
// Grid evaluation
// ---------------------------------------------------------------------------

void FlowGridSpec::validate() const {
  if (!solution.closed && !solution.ibvp) {
    fail(ErrorCode::DomainError, "flow grid has no solution handle");
  }
  if (nx < 2 || ny < 2) {
    fail(ErrorCode::DomainError, "flow grid needs at least 2x2 nodes");
  }
  if (!(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min) ||
      !(std::isfinite(y_min) && std::isfinite(y_max) && y_max > y_min)) {
    fail(ErrorCode::DomainError, "flow grid ranges must be finite and ordered");
  }
  const double x_floor = solution.allows_x_zero() ? 0.0 : 1e-300;
  if (x_min < x_floor) {
    fail(ErrorCode::DomainError, "flow grid requires x > 0");
  }
}

FlowField evaluate_field(const FlowGridSpec& spec) {
  spec.validate();
  const SimilaritySolution& sol = spec.solution;

  FlowField field;
  field.m = sol.m;
  field.a = sol.a;
  field.nu = sol.nu;
  field.b = sol.b;
  field.x.resize(static_cast<std::size_t>(spec.nx));
  field.y.resize(static_cast<std::size_t>(spec.ny));
  for (int i = 0; i < spec.nx; ++i) {
    field.x[static_cast<std::size_t>(i)] =
        spec.x_min + (spec.x_max - spec.x_min) * i / (spec.nx - 1);
  }
  for (int j = 0; j < spec.ny; ++j) {
    field.y[static_cast<std::size_t>(j)] =
        spec.y_min + (spec.y_max - spec.y_min) * j / (spec.ny - 1);
  }
  const std::size_t n = field.x.size() * field.y.size();
  field.u.resize(n);
  field.v.resize(n);
  field.psi.resize(n);

  for (std::size_t ix = 0; ix < field.x.size(); ++ix) {
    for (std::size_t iy = 0; iy < field.y.size(); ++iy) {
      const std::size_t k = field.index(ix, iy);
      try {
        field.u[k] = sol.u(field.x[ix], field.y[iy]);
        field.v[k] = sol.v(field.x[ix], field.y[iy]);
        field.psi[k] = sol.psi(field.x[ix], field.y[iy]);
      } catch (const Error& e) {
        if (!is_maskable(e.code())) throw;
        field.u[k] = kNaN;
        field.v[k] = kNaN;
        field.psi[k] = kNaN;
        ++field.masked;
      }
    }
  }
  if (field.masked > 0) {
    field.note = std::to_string(field.masked) +
                 " cells outside the solution domain were NaN-masked";
  }
  return field;
}

// ---------------------------------------------------------------------------
// Streamlines
// ---------------------------------------------------------------------------

Polyline trace_streamline(const FlowGridSpec& spec, double x0, double y0,
                          double arc_limit) {
  spec.validate();
  if (!(std::isfinite(arc_limit) && arc_limit > 0.0)) {
    fail(ErrorCode::DomainError, "arc limit must be positive");
  }
  const SimilaritySolution& sol = spec.solution;
  const double u0 = sol.u(x0, y0);
  const double v0 = sol.v(x0, y0);
  if (stagnant(u0, v0)) {
    fail(ErrorCode::SeedOnStagnation,
         "streamline seed sits where the horizontal velocity vanishes");
  }

  Polyline line;
  line.label = "seed(" + std::to_string(x0) + "," + std::to_string(y0) + ")";
  line.x.push_back(x0);
  line.y.push_back(y0);

  // Slope field; flags the step invalid when it crosses a stagnation zone.
  bool stalled = false;
  const auto slope = [&](double x, double y) -> double {
    const double uu = sol.u(x, y);
    const double vv = sol.v(x, y);
    if (stagnant(uu, vv)) {
      stalled = true;
      return 0.0;
    }
    return vv / uu;
  };

  double x = x0;
  double y = y0;
  double arc = 0.0;
  double h = std::min(1e-3 * (spec.x_max - spec.x_min), spec.x_max - x);
  int guard = 0;
  while (x < spec.x_max && arc < arc_limit) {
    if (++guard > 200000) {
      fail(ErrorCode::NoConvergence, "streamline tracing exceeded step budget");
    }
    h = std::min(h, spec.x_max - x);
    if (h < 1e-14 * (1.0 + std::abs(x))) break;

    // Classic embedded RK with one midpoint refinement: compare a full step
    // against two half steps for the local error estimate.
    stalled = false;
    const auto rk4 = [&](double xs, double ys, double hs) -> double {
      const double k1 = slope(xs, ys);
      const double k2 = slope(xs + hs / 2, ys + hs * k1 / 2);
      const double k3 = slope(xs + hs / 2, ys + hs * k2 / 2);
      const double k4 = slope(xs + hs, ys + hs * k3);
      return ys + hs * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    };
    double y_full = kNaN, y_half = kNaN;
    try {
      y_full = rk4(x, y, h);
      const double y_mid = rk4(x, y, h / 2);
      y_half = rk4(x + h / 2, y_mid, h / 2);
    } catch (const Error& e) {
      if (!is_maskable(e.code())) throw;
      stalled = true;  // stepped outside the solution domain: stop cleanly
    }
    if (stalled) break;
    const double err = std::abs(y_full - y_half) / 15.0;
    const double tol = 1e-10 * (1.0 + std::abs(y_half));
    if (err > tol) {
      h *= std::clamp(0.9 * std::pow(tol / (err + 1e-300), 0.25), 0.2, 1.0);
      continue;
    }
    const double y_new = y_half + (y_half - y_full) / 15.0;
    arc += std::hypot(h, y_new - y);
    x += h;
    y = y_new;
    line.x.push_back(x);
    line.y.push_back(y);
    if (y < spec.y_min || y > spec.y_max) break;  // left the grid window
    if (err < tol / 32.0) h *= 2.0;
  }
  return line;
}

// ---------------------------------------------------------------------------
// Profile slices and jet diagnostics
// ---------------------------------------------------------------------------

VelocityProfiles velocity_profiles(const FlowGridSpec& spec,
                                   const std::vector<double>& x_values) {
  spec.validate();
  const SimilaritySolution& sol = spec.solution;
  VelocityProfiles table;
  for (double xs : x_values) {
    if (!(xs > 0.0) && !sol.allows_x_zero()) {
      fail(ErrorCode::DomainError, "profile stations must satisfy x > 0");
    }
    for (int j = 0; j < spec.ny; ++j) {
      const double y =
          spec.y_min + (spec.y_max - spec.y_min) * j / (spec.ny - 1);
      double uu = kNaN, vv = kNaN;
      try {
        uu = sol.u(xs, y);
        vv = sol.v(xs, y);
      } catch (const Error& e) {
        if (!is_maskable(e.code())) throw;
      }
      table.x.push_back(xs);
      table.y.push_back(y);
      table.u.push_back(uu);
      table.v.push_back(vv);
    }
  }
  return table;
}

std::vector<FloodedJetRow> flooded_jet_table(double a, double nu,
                                             const std::vector<double>& xs,
                                             double y_probe) {
  const SimilaritySolution jet =
      SimilaritySolution::from_preset(exact::PresetName::FloodedJet, a, nu);
  std::vector<FloodedJetRow> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    check_x_positive(x);
    FloodedJetRow row;
    row.x = x;
    // Similarity height scale: y = tau * sqrt(3 nu) * x^{2/3}.
    const double y_scale = std::sqrt(3.0 * nu) * std::pow(x, 2.0 / 3.0);

    // Entrainment boundary: interior zero of v, bracketed in similarity units.
    double lo = 0.5 / a * y_scale;
    double hi = 6.0 / a * y_scale;
    if (!(jet.v(x, lo) > 0.0) || !(jet.v(x, hi) < 0.0)) {
      fail(ErrorCode::BracketLost, "jet boundary bracket failed");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (jet.v(x, mid) > 0.0 ? lo : hi) = mid;
    }
    row.y_zero = 0.5 * (lo + hi);

    // Maximum of v below the boundary by golden-section search.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double ga = 1e-8 * y_scale;
    double gb = row.y_zero;
    double g1 = gb - gr * (gb - ga);
    double g2 = ga + gr * (gb - ga);
    double f1 = jet.v(x, g1);
    double f2 = jet.v(x, g2);
    for (int it = 0; it < 300 && gb - ga > 1e-13 * y_scale; ++it) {
      if (f1 < f2) {
        ga = g1;
        g1 = g2;
        f1 = f2;
        g2 = ga + gr * (gb - ga);
        f2 = jet.v(x, g2);
      } else {
        gb = g2;
        g2 = g1;
        f2 = f1;
        g1 = gb - gr * (gb - ga);
        f1 = jet.v(x, g1);
      }
    }
    row.y_vmax = 0.5 * (ga + gb);
    row.v_max = jet.v(x, row.y_vmax);

    // Closed-form limit v(y -> inf) = -a sqrt(nu/3) x^{-2/3}, plus the finite
    // probe for comparison.
    row.v_lim = -a * std::sqrt(nu / 3.0) * std::pow(x, -2.0 / 3.0);
    row.v_probe = jet.v(x, y_probe);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Singular overlays and far-field coefficient
// ---------------------------------------------------------------------------

SingularLines singular_pole_line(const MValue& m, double a, double nu,
                                 const std::vector<double>& xs) {
  check_nu(nu);
  if (classify_regime(m) != Regime::PoleBoundedBvp) {
    fail(ErrorCode::RegimeUnsupported,
         "singular overlay lines exist for 1/3 <= m < 1/2 only");
  }
  const auto shoot = bvp::shoot_left_bvp(m, a);
  const Profile traj = bvp::extend_right(shoot);
  if (traj.termination.kind != TerminationKind::PoleAt) {
    fail(ErrorCode::NoConvergence, "rightward extension did not reach the pole");
  }
  SingularLines lines;
  lines.tau_p = traj.termination.tau_p;
  integrator::IntegrationSpec spec;
  spec.m = m;
  lines.tau_max =
      integrator::locate_event(traj, integrator::Event::dphi_zero(), spec);

  const double mv = m.value();
  const double height = std::sqrt(nu * (mv + 1.0) / mv);
  const double expo = 1.0 / (mv + 1.0);
  lines.pole_line.label = "pole_line";
  lines.stagnation_line.label = "stagnation_line";
  for (double x : xs) {
    if (!(x >= 0.0)) {
      fail(ErrorCode::DomainError, "overlay lines are drawn for x >= 0");
    }
    const double shape = height * std::pow(x, expo);
    lines.pole_line.x.push_back(x);
    lines.pole_line.y.push_back(-lines.tau_p * shape);
    lines.stagnation_line.x.push_back(x);
    lines.stagnation_line.y.push_back(-lines.tau_max * shape);
  }
  return lines;
}

double farfield_u0(const MValue& m, double b, double nu) {
  check_nu(nu);
  if (m.is_infinite() || !(m.value() > 0.5)) {
    fail(ErrorCode::RegimeUnsupported,
         "the algebraic far-field velocity law requires 1/2 < m < infinity");
  }
  if (!(std::isfinite(b) && b > 0.0)) {
    fail(ErrorCode::DomainError, "far-field coefficient b must be positive");
  }
  const double mv = m.value();
  return mv * b * std::pow(mv / ((mv + 1.0) * nu), (mv - 1.0) / 2.0);
}

}  // namespace mixlayer::flow
