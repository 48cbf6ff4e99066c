#include "mixlayer/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mixlayer/blowup_analysis.hpp"
#include "mixlayer/bvp_solver.hpp"
#include "mixlayer/core_types.hpp"
#include "mixlayer/exact_solutions.hpp"
#include "mixlayer/flowfield.hpp"
#include "mixlayer/phase_plane.hpp"
#include "mixlayer/serializer.hpp"

namespace mixlayer::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GlobalOpts {
  std::string out_dir = "out";
  std::string format = "csv";
  double T = 7.0;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  int jobs = 1;
  bool quiet = false;
};

bvp::ShootConfig shoot_config(const GlobalOpts& g) {
  bvp::ShootConfig cfg;
  cfg.T = g.T;
  if (g.rel_tol) cfg.rel_tol = *g.rel_tol;
  if (g.abs_tol) cfg.abs_tol = *g.abs_tol;
  return cfg;
}

std::string write_doc(const io::OutputDoc& doc, const GlobalOpts& g,
                      const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(g.out_dir, ec);
  if (ec) {
    fail(ErrorCode::IoError, "cannot create output directory '" + g.out_dir +
                                 "': " + ec.message());
  }
  const std::string path =
      (std::filesystem::path(g.out_dir) / (stem + "." + g.format)).string();
  if (g.format == "json") {
    io::write_json(doc, path);
  } else {
    io::write_csv(doc, path);
  }
  if (!g.quiet) std::cout << "wrote " << path << "\n";
  return path;
}

void put(io::OutputDoc& doc, const std::string& key, double value) {
  doc.metadata[key] = io::format_value(value);
}

// Single-row report column.
void report_value(io::OutputDoc& doc, const std::string& name, double value) {
  doc.add_column(name, {value});
}

std::string termination_text(const Termination& t) {
  switch (t.kind) {
    case TerminationKind::PoleAt:
      return "pole tau_p=" + io::format_value(t.tau_p);
    case TerminationKind::Truncated:
      return "truncated " + t.reason;
    case TerminationKind::Completed:
      return "";
  }
  return "";
}

// ---------------------------------------------------------------------------
// solve

struct SolveOpts {
  std::string m_text;
  std::optional<double> a;
  std::optional<double> b;
  double tau_min = -7.0;
  double tau_max = 5.0;
  int samples = 601;
};

void sample_range(double lo, double hi, int n, std::vector<double>& out) {
  for (int i = 0; i < n; ++i) {
    out.push_back(std::clamp(lo + (hi - lo) * i / (n - 1), lo, hi));
  }
}

int cmd_solve(const GlobalOpts& g, const SolveOpts& o) {
  const MValue m = MValue::parse(o.m_text);
  if (o.samples < 2) fail(ErrorCode::DomainError, "--samples must be >= 2");
  if (!(o.tau_min < o.tau_max)) {
    fail(ErrorCode::DomainError, "--tau-min must be below --tau-max");
  }
  const bvp::ShootConfig cfg = shoot_config(g);

  io::OutputDoc profile;
  profile.kind = io::DocKind::Profile;
  profile.metadata["command"] = "solve";
  profile.metadata["m"] = m.str();
  put(profile, "T", g.T);
  io::OutputDoc report = profile;
  report.kind = io::DocKind::Report;

  std::vector<double> tau, phi, dphi, ddphi;
  if (o.b) {
    // Two-parameter problem: pick the amplitude matching the far-field
    // coefficient, then sample the scaled solution on the requested range
    // (series tails cover the whole line).
    if (m.is_infinite()) {
      fail(ErrorCode::RegimeUnsupported,
           "--b selects the two-parameter problem for finite m > 1/2; the "
           "infinite limit takes --a");
    }
    const bvp::IbvpSolution sol = bvp::solve_ibvp(m.value(), *o.b, cfg);
    sample_range(o.tau_min, o.tau_max, o.samples, tau);
    for (double t : tau) {
      const Triple tr = sol.eval(t);
      phi.push_back(tr.phi);
      dphi.push_back(tr.dphi);
      ddphi.push_back(tr.ddphi);
    }
    put(profile, "a", sol.a);
    put(profile, "b", sol.b_target);
    put(profile, "d", sol.d);
    const bvp::IdentityReport idr =
        bvp::verify_integral_identities(sol.base, sol.base_profile, cfg);
    report.metadata = profile.metadata;
    report_value(report, "a", sol.a);
    report_value(report, "d", sol.d);
    report_value(report, "b", sol.b_target);
    report_value(report, "b_unit", sol.b1);
    report_value(report, "shoot_residual", sol.base.residual);
    report_value(report, "farfield_fit_spread", sol.fit.spread);
    report_value(report, "identity_ddphi_rel", idr.ddphi_rel);
    report_value(report, "identity_dphi_rel", idr.dphi_rel);
    if (!g.quiet) {
      std::cout << "a=" << io::format_value(sol.a)
                << " d=" << io::format_value(sol.d) << "\n";
    }
  } else {
    if (!o.a) {
      fail(ErrorCode::DomainError, "solve needs --a or --b");
    }
    const bvp::ShootResult shoot = bvp::shoot_left_bvp(m, *o.a, cfg);
    const Profile p = bvp::extend_right(shoot, cfg);
    const double lo = std::max(o.tau_min, p.tau_front());
    const double hi = std::min(o.tau_max, p.tau_back());
    if (!(lo < hi)) {
      fail(ErrorCode::DomainError,
           "requested tau range misses the computed profile [" +
               io::format_value(p.tau_front()) + ", " +
               io::format_value(p.tau_back()) + "]");
    }
    sample_range(lo, hi, o.samples, tau);
    for (double t : tau) {
      const Triple tr = p.eval(t);
      phi.push_back(tr.phi);
      dphi.push_back(tr.dphi);
      ddphi.push_back(tr.ddphi);
    }
    profile.termination_comment = termination_text(p.termination);
    put(profile, "a", shoot.a);
    put(profile, "d", shoot.d);
    const bvp::IdentityReport idr =
        bvp::verify_integral_identities(shoot, p, cfg);
    report.metadata = profile.metadata;
    report_value(report, "a", shoot.a);
    report_value(report, "d", shoot.d);
    report_value(report, "b",
                 shoot.b_extracted ? *shoot.b_extracted : kNaN);
    double tau_p = shoot.tau_pole ? *shoot.tau_pole : kNaN;
    if (p.termination.kind == TerminationKind::PoleAt) {
      tau_p = p.termination.tau_p;
    }
    report_value(report, "tau_p", tau_p);
    report_value(report, "shoot_residual", shoot.residual);
    report_value(report, "identity_ddphi_rel", idr.ddphi_rel);
    report_value(report, "identity_dphi_rel", idr.dphi_rel);
    if (!g.quiet) {
      std::cout << "a=" << io::format_value(shoot.a)
                << " d=" << io::format_value(shoot.d) << "\n";
    }
  }
  profile.add_column("tau", std::move(tau));
  profile.add_column("phi", std::move(phi));
  profile.add_column("dphi", std::move(dphi));
  profile.add_column("ddphi", std::move(ddphi));
  write_doc(profile, g, "solve_profile");
  write_doc(report, g, "solve_report");
  return 0;
}

// ---------------------------------------------------------------------------
// table

struct TableOpts {
  std::string which;
  std::vector<std::string> m_texts;
};

int cmd_table(const GlobalOpts& g, const TableOpts& o) {
  const bvp::ShootConfig cfg = shoot_config(g);
  const bool want_d = o.which == "d";
  const std::size_t n = o.m_texts.size();
  std::vector<double> mv(n, kNaN), val(n, kNaN), ok(n, 0.0);
  std::vector<std::string> notes(n);

  auto one = [&](std::size_t i) {
    try {
      const MValue m = MValue::parse(o.m_texts[i]);
      mv[i] = m.is_infinite() ? std::numeric_limits<double>::infinity()
                              : m.value();
      val[i] = want_d ? bvp::d_table(m, cfg) : bvp::b_table(m, cfg);
      ok[i] = 1.0;
    } catch (const Error& e) {
      notes[i] = e.what();
    }
  };

  if (g.jobs > 1) {
    // Fixed-size batches; results land by index, so the output is identical
    // to a serial sweep.
    const std::size_t batch = static_cast<std::size_t>(g.jobs);
    for (std::size_t start = 0; start < n; start += batch) {
      std::vector<std::future<void>> futs;
      for (std::size_t i = start; i < std::min(start + batch, n); ++i) {
        futs.push_back(std::async(std::launch::async, one, i));
      }
      for (auto& f : futs) f.get();
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) one(i);
  }

  io::OutputDoc doc;
  doc.kind = io::DocKind::Table;
  doc.metadata["command"] = "table";
  doc.metadata["which"] = o.which;
  put(doc, "T", g.T);
  for (std::size_t i = 0; i < n; ++i) {
    if (!notes[i].empty()) {
      doc.metadata["error_m_" + o.m_texts[i]] = notes[i];
    }
  }
  doc.add_column("m", std::move(mv));
  doc.add_column(o.which, std::move(val));
  doc.add_column("ok", std::move(ok));
  write_doc(doc, g, "table_" + o.which);
  return 0;
}

// ---------------------------------------------------------------------------
// flow

struct FlowOpts {
  std::string preset;
  std::string m_text;
  std::optional<double> b;
  double a = 1.0;
  double nu = 1.0;
  double x_min = 0.5, x_max = 3.0;
  int nx = 21;
  double y_min = -3.0, y_max = 3.0;
  int ny = 41;
  std::vector<double> seeds;  // flattened (x, y) pairs
  double arc_limit = 50.0;
  std::vector<double> stations = {0.75, 1.75, 2.75, 3.75, 4.75};
  std::vector<double> profile_xs;
};

int cmd_flow(const GlobalOpts& g, const FlowOpts& o) {
  flow::SimilaritySolution sol;
  if (!o.preset.empty()) {
    exact::PresetName name = exact::PresetName::FloodedJet;
    if (o.preset == "separation") name = exact::PresetName::Separation;
    if (o.preset == "near-wall-jet") name = exact::PresetName::NearWallJet;
    sol = flow::SimilaritySolution::from_preset(name, o.a, o.nu);
  } else {
    if (o.m_text.empty() || !o.b) {
      fail(ErrorCode::DomainError,
           "flow needs --preset, or both --m and --b for the two-parameter "
           "problem");
    }
    sol = flow::SimilaritySolution::from_ibvp(MValue::parse(o.m_text), *o.b,
                                              o.nu, shoot_config(g));
  }

  flow::FlowGridSpec spec;
  spec.solution = sol;
  spec.x_min = o.x_min;
  spec.x_max = o.x_max;
  spec.nx = o.nx;
  spec.y_min = o.y_min;
  spec.y_max = o.y_max;
  spec.ny = o.ny;

  const flow::FlowField field = flow::evaluate_field(spec);
  io::OutputDoc fdoc;
  fdoc.kind = io::DocKind::Field;
  fdoc.metadata["command"] = "flow";
  fdoc.metadata["m"] = field.m.str();
  fdoc.metadata["source"] = sol.source;
  put(fdoc, "a", field.a);
  put(fdoc, "nu", field.nu);
  if (field.b) put(fdoc, "b", *field.b);
  put(fdoc, "nx", o.nx);
  put(fdoc, "ny", o.ny);
  put(fdoc, "masked", static_cast<double>(field.masked));
  if (!field.note.empty()) fdoc.metadata["note"] = field.note;
  if (!field.m.is_infinite() &&
      classify_regime(field.m) == Regime::GlobalIbvp && field.b) {
    put(fdoc, "farfield_u0", flow::farfield_u0(field.m, *field.b, field.nu));
  }
  {
    std::vector<double> cx, cy, cu, cv, cpsi;
    const std::size_t nx = field.x.size(), ny = field.y.size();
    cx.reserve(nx * ny);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      for (std::size_t iy = 0; iy < ny; ++iy) {
        cx.push_back(field.x[ix]);
        cy.push_back(field.y[iy]);
        cu.push_back(field.u_at(ix, iy));
        cv.push_back(field.v_at(ix, iy));
        cpsi.push_back(field.psi_at(ix, iy));
      }
    }
    fdoc.add_column("x", std::move(cx));
    fdoc.add_column("y", std::move(cy));
    fdoc.add_column("u", std::move(cu));
    fdoc.add_column("v", std::move(cv));
    fdoc.add_column("psi", std::move(cpsi));
  }
  write_doc(fdoc, g, "flow_field");

  if (!o.seeds.empty()) {
    if (o.seeds.size() % 2 != 0) {
      fail(ErrorCode::DomainError, "--seed takes x,y pairs");
    }
    io::OutputDoc sdoc;
    sdoc.kind = io::DocKind::Streamlines;
    sdoc.metadata["command"] = "flow";
    sdoc.metadata["m"] = field.m.str();
    std::vector<double> si, sx, sy;
    for (std::size_t k = 0; 2 * k < o.seeds.size(); ++k) {
      const double x0 = o.seeds[2 * k];
      const double y0 = o.seeds[2 * k + 1];
      const flow::Polyline line =
          flow::trace_streamline(spec, x0, y0, o.arc_limit);
      sdoc.metadata["seed_" + std::to_string(k)] =
          io::format_value(x0) + "," + io::format_value(y0);
      for (std::size_t i = 0; i < line.x.size(); ++i) {
        si.push_back(static_cast<double>(k));
        sx.push_back(line.x[i]);
        sy.push_back(line.y[i]);
      }
    }
    sdoc.add_column("seed", std::move(si));
    sdoc.add_column("x", std::move(sx));
    sdoc.add_column("y", std::move(sy));
    write_doc(sdoc, g, "flow_streamlines");
  }

  if (o.preset == "flooded-jet") {
    const auto rows = flow::flooded_jet_table(o.a, o.nu, o.stations);
    io::OutputDoc tdoc;
    tdoc.kind = io::DocKind::Table;
    tdoc.metadata["command"] = "flow";
    tdoc.metadata["preset"] = o.preset;
    put(tdoc, "a", o.a);
    put(tdoc, "nu", o.nu);
    std::vector<double> xs, yz, ym, vm, vl, vp;
    for (const auto& r : rows) {
      xs.push_back(r.x);
      yz.push_back(r.y_zero);
      ym.push_back(r.y_vmax);
      vm.push_back(r.v_max);
      vl.push_back(r.v_lim);
      vp.push_back(r.v_probe);
    }
    tdoc.add_column("x", std::move(xs));
    tdoc.add_column("y_zero", std::move(yz));
    tdoc.add_column("y_vmax", std::move(ym));
    tdoc.add_column("v_max", std::move(vm));
    tdoc.add_column("v_lim", std::move(vl));
    tdoc.add_column("v_probe", std::move(vp));
    write_doc(tdoc, g, "flow_stations");
  }

  if (o.preset == "near-wall-jet") {
    const flow::SingularLines lines =
        flow::singular_pole_line(field.m, o.a, o.nu, field.x);
    io::OutputDoc odoc;
    odoc.kind = io::DocKind::Table;
    odoc.metadata["command"] = "flow";
    odoc.metadata["preset"] = o.preset;
    put(odoc, "tau_p", lines.tau_p);
    put(odoc, "tau_max", lines.tau_max);
    odoc.add_column("x", field.x);
    odoc.add_column("y_pole", lines.pole_line.y);
    odoc.add_column("y_stagnation", lines.stagnation_line.y);
    write_doc(odoc, g, "flow_overlays");
  }

  if (!o.profile_xs.empty()) {
    const flow::VelocityProfiles vp =
        flow::velocity_profiles(spec, o.profile_xs);
    io::OutputDoc pdoc;
    pdoc.kind = io::DocKind::Profile;
    pdoc.metadata["command"] = "flow";
    pdoc.metadata["m"] = field.m.str();
    pdoc.add_column("x", vp.x);
    pdoc.add_column("y", vp.y);
    pdoc.add_column("u", vp.u);
    pdoc.add_column("v", vp.v);
    write_doc(pdoc, g, "flow_profiles");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// phase

struct PhaseOpts {
  std::string m_text;
  double a = 1.0;
  std::optional<double> phi_max;
  int order = 8;
};

int cmd_phase(const GlobalOpts& g, const PhaseOpts& o) {
  const MValue m = MValue::parse(o.m_text);
  phase::PhaseConfig cfg;
  cfg.series_order = o.order;
  if (g.rel_tol) cfg.rel_tol = *g.rel_tol;
  if (g.abs_tol) cfg.abs_tol = *g.abs_tol;
  const double phi_hi = o.phi_max ? *o.phi_max : 30.0 * o.a;
  const phase::PhaseProfile prof = phase::solve_phase_cp(m, o.a, phi_hi, cfg);

  io::OutputDoc pdoc;
  pdoc.kind = io::DocKind::Profile;
  pdoc.metadata["command"] = "phase";
  pdoc.metadata["m"] = m.str();
  put(pdoc, "a", o.a);
  put(pdoc, "phi_max_requested", phi_hi);
  put(pdoc, "series_order", o.order);
  // "termination" itself is the reserved trailing-comment key.
  pdoc.metadata["termination_kind"] = phase_termination_name(prof.termination);
  if (prof.termination == phase::PhaseTermination::BranchPoint) {
    pdoc.termination_comment =
        "branch-point phi_zero=" + io::format_value(*prof.phi_zero) +
        " c_z=" + io::format_value(*prof.c_z);
  } else if (prof.termination == phase::PhaseTermination::Truncated) {
    pdoc.termination_comment = "truncated";
  }
  pdoc.add_column("phi", prof.phi);
  pdoc.add_column("f", prof.f);
  pdoc.add_column("fdot", prof.fdot);
  write_doc(pdoc, g, "phase_profile");

  io::OutputDoc rdoc;
  rdoc.kind = io::DocKind::Report;
  rdoc.metadata = pdoc.metadata;
  report_value(rdoc, "phi_lo", prof.phi_min());
  report_value(rdoc, "phi_hi", prof.phi_max());
  report_value(rdoc, "phi_zero", prof.phi_zero ? *prof.phi_zero : kNaN);
  report_value(rdoc, "c_z", prof.c_z ? *prof.c_z : kNaN);

  const Regime regime = classify_regime(m);
  if (regime == Regime::FloodedJetBoundary) {
    // The bounded boundary case has the exact parabola (a^2 - phi^2)/2.
    double dev = 0.0;
    for (std::size_t i = 0; i < prof.phi.size(); ++i) {
      const double exact_f = 0.5 * (o.a * o.a - prof.phi[i] * prof.phi[i]);
      dev = std::max(dev, std::abs(prof.f[i] - exact_f));
    }
    report_value(rdoc, "parabola_max_dev", dev);
    rdoc.metadata["closed_form"] = "f = (a^2 - phi^2)/2";
  }
  if (regime == Regime::FloodedJetBoundary || regime == Regime::GlobalIbvp ||
      regime == Regime::SeparationLimit) {
    const bvp::ShootResult shoot =
        bvp::shoot_left_bvp(m, o.a, shoot_config(g));
    const phase::PhaseConsistencyReport rep =
        phase::phase_consistency_check(shoot, prof);
    report_value(rdoc, "consistency_max_dev", rep.max_abs_dev);
  }
  if (regime == Regime::GlobalIbvp) {
    const double b_a =
        bvp::b_table(m, shoot_config(g)) * std::pow(o.a, m.value() + 1.0);
    report_value(rdoc, "B_ref", phase::farfield_B(m, b_a));
    double b_fit = kNaN;
    try {
      b_fit = phase::farfield_fit_B(prof);
    } catch (const Error& e) {
      rdoc.metadata["farfield_note"] = std::string(e.what()) +
                                       " (increase --phi-max to reach the "
                                       "algebraic far field)";
    }
    report_value(rdoc, "B_fit", b_fit);
  }
  write_doc(rdoc, g, "phase_report");
  if (!g.quiet) {
    std::cout << "termination=" << phase_termination_name(prof.termination)
              << " phi_hi=" << io::format_value(prof.phi_max()) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// blowup

struct BlowupOpts {
  double m = 1.0;
};

int cmd_blowup(const GlobalOpts& g, const BlowupOpts& o) {
  const blowup::PoleLocalForm form = blowup::pole_local_form(o.m);
  io::OutputDoc doc;
  doc.kind = io::DocKind::Report;
  doc.metadata["command"] = "blowup";
  doc.metadata["regime"] = blowup::pole_regime_name(form.regime);
  put(doc, "m", o.m);
  report_value(doc, "m", form.m);
  report_value(doc, "alpha", form.alpha);
  report_value(doc, "beta", form.beta ? *form.beta : kNaN);
  report_value(doc, "lambda1", form.lambda1 ? *form.lambda1 : kNaN);
  report_value(doc, "lambda2", form.lambda2 ? *form.lambda2 : kNaN);
  report_value(doc, "lambda3", form.lambda3);
  report_value(doc, "m1", form.m1_const);
  report_value(doc, "kappa", blowup::kappa(o.m));
  write_doc(doc, g, "blowup_report");
  if (!g.quiet) {
    std::cout << "regime=" << blowup::pole_regime_name(form.regime) << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  GlobalOpts g;
  SolveOpts so;
  TableOpts to;
  FlowOpts fo;
  PhaseOpts po;
  BlowupOpts bo;

  CLI::App app{"self-similar boundary-layer solver and flow-field toolkit",
               "mixlayer"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value file preloading the global flags");
  app.add_option("--out", g.out_dir, "output directory")
      ->envname("MIXLAYER_OUT")
      ->capture_default_str();
  app.add_option("--format", g.format, "output file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--T", g.T, "left cutoff of the series handoff")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--rel-tol", g.rel_tol, "integrator relative tolerance");
  app.add_option("--abs-tol", g.abs_tol, "integrator absolute tolerance");
  app.add_option("--jobs", g.jobs, "worker threads for table sweeps")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "suppress progress lines");

  CLI::App* solve = app.add_subcommand(
      "solve", "solve the profile problem for (m, a) or (m, b)");
  solve->fallthrough();
  solve->add_option("--m", so.m_text,
                    "similarity exponent (positive number or 'inf')")
      ->required();
  CLI::Option* aopt =
      solve->add_option("--a", so.a, "equilibrium amplitude a > 0");
  CLI::Option* bopt = solve->add_option(
      "--b", so.b, "far-field coefficient (two-parameter problem)");
  aopt->excludes(bopt);
  bopt->excludes(aopt);
  solve->add_option("--tau-min", so.tau_min, "profile sample range start")
      ->capture_default_str();
  solve->add_option("--tau-max", so.tau_max, "profile sample range end")
      ->capture_default_str();
  solve->add_option("--samples", so.samples, "profile sample count")
      ->capture_default_str();

  CLI::App* table =
      app.add_subcommand("table", "sweep m and tabulate d_m(1) or b_m(1)");
  table->fallthrough();
  table->add_option("which", to.which, "which coefficient: d or b")
      ->required()
      ->check(CLI::IsMember({"d", "b"}));
  table->add_option("--m", to.m_texts, "comma-separated m values")
      ->required()
      ->delimiter(',');

  CLI::App* flowc = app.add_subcommand(
      "flow", "physical-plane fields, streamlines, and station tables");
  flowc->fallthrough();
  flowc
      ->add_option("--preset", fo.preset,
                   "closed-form problem: flooded-jet, separation, or "
                   "near-wall-jet")
      ->check(CLI::IsMember({"flooded-jet", "separation", "near-wall-jet"}));
  flowc->add_option("--m", fo.m_text, "similarity exponent (with --b)");
  flowc->add_option("--b", fo.b, "far-field coefficient (with --m)");
  flowc->add_option("--a", fo.a, "amplitude for presets")
      ->capture_default_str();
  flowc->add_option("--nu", fo.nu, "kinematic viscosity")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  flowc->add_option("--x-min", fo.x_min)->capture_default_str();
  flowc->add_option("--x-max", fo.x_max)->capture_default_str();
  flowc->add_option("--nx", fo.nx)->capture_default_str();
  flowc->add_option("--y-min", fo.y_min)->capture_default_str();
  flowc->add_option("--y-max", fo.y_max)->capture_default_str();
  flowc->add_option("--ny", fo.ny)->capture_default_str();
  flowc->add_option("--seed", fo.seeds, "streamline seed x,y (repeatable)")
      ->delimiter(',');
  flowc->add_option("--arc-limit", fo.arc_limit, "streamline arc budget")
      ->capture_default_str();
  flowc->add_option("--stations", fo.stations,
                    "x stations for the flooded-jet table")
      ->delimiter(',');
  flowc->add_option("--profiles", fo.profile_xs,
                    "x stations for velocity profile slices")
      ->delimiter(',');

  CLI::App* phasec = app.add_subcommand(
      "phase", "phase-plane solve with far-field fit and consistency check");
  phasec->fallthrough();
  phasec->add_option("--m", po.m_text,
                     "similarity exponent (positive number or 'inf')")
      ->required();
  phasec->add_option("--a", po.a, "amplitude a > 0")->capture_default_str();
  phasec->add_option("--phi-max", po.phi_max,
                     "right edge of the phase march (default 30a)");
  phasec->add_option("--order", po.order, "rest-point series order")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();

  CLI::App* blowupc = app.add_subcommand(
      "blowup", "classify the local solution family at a pole");
  blowupc->fallthrough();
  blowupc->add_option("--m", bo.m, "similarity exponent (finite)")
      ->required()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve)) return cmd_solve(g, so);
    if (app.got_subcommand(table)) return cmd_table(g, to);
    if (app.got_subcommand(flowc)) return cmd_flow(g, fo);
    if (app.got_subcommand(phasec)) return cmd_phase(g, po);
    if (app.got_subcommand(blowupc)) return cmd_blowup(g, bo);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_exit_class(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace mixlayer::cli
