#include "mixlayer/integrator.hpp"

#include "mixlayer/detail/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace mixlayer::integrator {

namespace {

constexpr double kMinStep = 1e-14;
constexpr long kMaxSteps = 2'000'000;

using detail::Vec;

struct ZeroEventHit {
  double theta;  // position within the step, in traversal order
  EventKind kind;
  int component;
};

int event_component(EventKind kind) {
  switch (kind) {
    case EventKind::PhiZero: return 0;
    case EventKind::DPhiZero: return 1;
    case EventKind::DDPhiZero: return 2;
    default: return -1;
  }
}

const char* event_reason(EventKind kind) {
  switch (kind) {
    case EventKind::PhiZero: return "phi_zero";
    case EventKind::DPhiZero: return "dphi_zero";
    case EventKind::DDPhiZero: return "ddphi_zero";
    case EventKind::StopAtTau: return "stop_at_tau";
    default: return "";
  }
}

// Blow-up signature near a simple pole of the profile: phi' < 0 on either
// approach, phi and phi'' share their sign, and that sign identifies the side
// (negative when marching right toward the pole, positive when marching left).
bool pole_signature(const Vec<3>& y, double sgn) {
  if (!(y[1] < 0.0)) return false;
  if (!(y[0] * y[2] > 0.0)) return false;
  return sgn > 0.0 ? y[0] < 0.0 : y[0] > 0.0;
}

// Refines the pole position by fitting the reciprocal of phi, which is linear
// in tau under the universal local form phi ~ 6m/[(m+1)(tau - tau_p)]. Uses
// the trailing samples within a decade of the largest |phi|.
double refine_pole(const std::vector<double>& taus, const std::vector<double>& phis,
                   const MValue& m, double sgn) {
  const double t_end = taus.back();
  const double phi_end = phis.back();
  const double cutoff = std::abs(phi_end) / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = taus.size(); i-- > 0;) {
    if (std::abs(phis[i]) < cutoff) break;
    const double x = taus[i] - t_end;  // shift for conditioning
    const double u = 1.0 / phis[i];
    sx += x;
    sy += u;
    sxx += x * x;
    sxy += x * u;
    ++n;
  }
  const double c = m.is_infinite() ? 6.0 : 6.0 * m.value() / (m.value() + 1.0);
  const double fallback = t_end - c / phi_end;
  if (n < 3) return fallback;
  const double det = n * sxx - sx * sx;
  if (det == 0.0) return fallback;
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;
  if (slope == 0.0) return fallback;
  const double tau_p = t_end - intercept / slope;
  // The pole must lie ahead of the last sample in the direction of travel.
  if (!std::isfinite(tau_p) || !((tau_p - t_end) * sgn > 0.0)) return fallback;
  return tau_p;
}

// Exact reversal of the contiguous interpolant so that leftward steps can be
// stored with a positive step width (profiles always read left to right).
DenseSegment reverse_segment(const DenseSegment& s) {
  DenseSegment r;
  r.tau0 = s.tau0 + s.h;
  r.h = -s.h;
  for (int i = 0; i < 3; ++i) {
    r.rcont[0][i] = s.rcont[0][i] + s.rcont[1][i];
    r.rcont[1][i] = -s.rcont[1][i];
    r.rcont[2][i] = s.rcont[2][i] + s.rcont[3][i];
    r.rcont[3][i] = -s.rcont[3][i];
    r.rcont[4][i] = s.rcont[4][i];
  }
  return r;
}

// Sharpens a located crossing beyond interpolant accuracy: a single
// fifth-order substep from the accepted step start carries far less error
// than the quartic interpolant, and Newton corrections on that state pin the
// true trajectory zero. Returns the refined tau and the state there.
template <class F>
std::pair<double, Vec<3>> refine_crossing(F&& f, double t0, const Vec<3>& y0, int comp,
                                          double te, double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  std::array<Vec<3>, 7> ks;
  Vec<3> ze = y0;
  auto state_at = [&](double tq) {
    if (tq == t0) return y0;
    ks[0] = f(t0, y0);
    Vec<3> y5;
    detail::dopri5_attempt<3>(f, t0, y0, tq - t0, 1e-12, 1e-14, ks, y5);
    return y5;
  };
  for (int it = 0; it < 4; ++it) {
    ze = state_at(te);
    const double g = ze[comp];
    const double gp = f(te, ze)[comp];
    if (g == 0.0 || gp == 0.0 || !std::isfinite(gp)) break;
    const double step = g / gp;
    double tn = te - step;
    if (tn < lo) tn = lo;
    if (tn > hi) tn = hi;
    if (tn == te) break;
    te = tn;
  }
  ze = state_at(te);
  return {te, ze};
}

// Locates a sign change of one state component inside an accepted step by
// scanning the interpolant in traversal order and bisecting the first
// sign-changing subinterval.
std::optional<double> bisect_in_segment(const DenseSegment& seg, int comp, double g0,
                                        double g1) {
  auto value = [&](double theta) { return seg.eval(seg.tau0 + theta * seg.h)[comp]; };
  constexpr int kScan = 8;
  double ta = 0.0, ga = g0;
  for (int j = 1; j <= kScan; ++j) {
    const double tb = static_cast<double>(j) / kScan;
    const double gb = (j == kScan) ? g1 : value(tb);
    if (ga == 0.0 && j > 1) return ta;  // landed exactly on the root
    if (ga * gb < 0.0 || (gb == 0.0)) {
      double lo = ta, hi = tb, glo = ga;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = value(mid);
        if (gm == 0.0) return mid;
        if (glo * gm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          glo = gm;
        }
      }
      return 0.5 * (lo + hi);
    }
    ta = tb;
    ga = gb;
  }
  return std::nullopt;
}

}  // namespace

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::PhiZero: return "PhiZero";
    case EventKind::DPhiZero: return "DPhiZero";
    case EventKind::DDPhiZero: return "DDPhiZero";
    case EventKind::PoleGuard: return "PoleGuard";
    case EventKind::StopAtTau: return "StopAtTau";
  }
  return "?";
}

void IntegrationSpec::validate() const {
  auto check_tol = [](double v, const char* name) {
    if (!(v > 0.0) || !(v <= 1e-2) || !std::isfinite(v)) {
      fail(ErrorCode::DomainError,
           std::string(name) + " must lie in (0, 1e-2], got " + std::to_string(v));
    }
  };
  check_tol(rel_tol, "rel_tol");
  check_tol(abs_tol, "abs_tol");
  if (!(max_step > 0.0) || !std::isfinite(max_step)) {
    fail(ErrorCode::DomainError, "max_step must be positive");
  }
  if (!(pole_threshold >= 1e3) || !std::isfinite(pole_threshold)) {
    fail(ErrorCode::DomainError, "pole_threshold must be at least 1e3");
  }
  if (!(max_span > 0.0)) {
    fail(ErrorCode::DomainError, "max_span must be positive");
  }
  for (const Event& e : events) {
    if (e.kind == EventKind::StopAtTau && !std::isfinite(e.value)) {
      fail(ErrorCode::DomainError, "StopAtTau target must be finite");
    }
  }
}

std::array<double, 3> rhs(const MValue& m, const OdeState& s) {
  return {s.z2, s.z3, m.quad_coeff() * s.z2 * s.z2 - s.z1 * s.z3};
}

Profile integrate(const OdeState& start, Direction direction, const IntegrationSpec& spec) {
  spec.validate();
  if (!std::isfinite(start.tau) || !std::isfinite(start.z1) || !std::isfinite(start.z2) ||
      !std::isfinite(start.z3)) {
    fail(ErrorCode::NonFinite, "integration start state must be finite");
  }
  const double sgn = direction == Direction::Right ? 1.0 : -1.0;

  bool want_pole = false;
  std::array<bool, 3> want_zero{false, false, false};
  std::optional<double> stop_target;
  std::array<EventKind, 3> zero_kind{EventKind::PhiZero, EventKind::DPhiZero,
                                     EventKind::DDPhiZero};
  for (const Event& e : spec.events) {
    switch (e.kind) {
      case EventKind::PoleGuard:
        want_pole = true;
        break;
      case EventKind::StopAtTau: {
        if (!((e.value - start.tau) * sgn > 0.0)) {
          fail(ErrorCode::DomainError, "StopAtTau target must lie ahead of the start");
        }
        if (!stop_target || (e.value - *stop_target) * sgn < 0.0) stop_target = e.value;
        break;
      }
      default:
        want_zero[event_component(e.kind)] = true;
        break;
    }
  }

  auto f = [&spec](double, const Vec<3>& y) -> Vec<3> {
    OdeState s{0.0, y[0], y[1], y[2]};
    const auto d = rhs(spec.m, s);
    return {d[0], d[1], d[2]};
  };

  Profile out;
  auto push_sample = [&out](double t, const Vec<3>& y) {
    out.tau.push_back(t);
    out.phi.push_back(y[0]);
    out.dphi.push_back(y[1]);
    out.ddphi.push_back(y[2]);
  };

  double t = start.tau;
  Vec<3> y{start.z1, start.z2, start.z3};
  push_sample(t, y);

  std::array<Vec<3>, 7> k;
  k[0] = f(t, y);

  // Initial step from the usual scale heuristic.
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sc = spec.abs_tol + spec.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k[0][i] / sc) * (k[0][i] / sc);
    }
    d0 = std::sqrt(d0 / 3.0);
    d1 = std::sqrt(d1 / 3.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = sgn * std::min({h0, spec.max_step, 1e-2});
  }

  std::vector<DenseSegment> raw_segments;
  Termination term = Termination::truncated("step budget exhausted");
  bool finished = false;

  for (long step = 0; step < kMaxSteps && !finished; ++step) {
    bool clamped_to_stop = false;
    if (stop_target && (t + h - *stop_target) * sgn >= 0.0) {
      h = *stop_target - t;
      clamped_to_stop = true;
    }
    if (std::abs(h) < kMinStep) {
      if (clamped_to_stop) {
        // Already at the target to within the step floor.
        term = Termination::completed();
        term.reason = event_reason(EventKind::StopAtTau);
        break;
      }
      fail(ErrorCode::StepUnderflow,
           "step size collapsed below 1e-14 at tau=" + std::to_string(t));
    }

    Vec<3> y5;
    const double err =
        detail::dopri5_attempt<3>(f, t, y, h, spec.rel_tol, spec.abs_tol, k, y5);
    if (err > 1.0) {
      h *= std::min(1.0, detail::dopri5_factor(err));
      continue;
    }

    const double t_new = clamped_to_stop ? *stop_target : t + h;
    for (int i = 0; i < 3; ++i) {
      if (!std::isfinite(y5[i])) {
        fail(ErrorCode::NonFinite, "state left the representable range near tau=" +
                                       std::to_string(t));
      }
    }

    DenseSegment seg;
    seg.tau0 = t;
    seg.h = h;
    seg.rcont = detail::dopri5_dense<3>(y, y5, h, k);

    // Zero-crossing events, earliest in traversal order wins.
    std::optional<ZeroEventHit> hit;
    for (int c = 0; c < 3; ++c) {
      if (!want_zero[c]) continue;
      const double g0 = y[c], g1 = y5[c];
      if (g0 == 0.0) continue;  // started on the event surface
      if (g0 * g1 < 0.0 || g1 == 0.0) {
        if (auto theta = bisect_in_segment(seg, c, g0, g1)) {
          if (!hit || *theta < hit->theta) hit = ZeroEventHit{*theta, zero_kind[c], c};
        }
      }
    }

    if (hit) {
      auto [te, ye] = refine_crossing(f, t, y, hit->component, t + hit->theta * h, t, t + h);
      if (te == t) te = std::nextafter(t, t + h);  // keep the grid strictly monotone
      raw_segments.push_back(seg);
      push_sample(te, ye);
      term = Termination::completed();
      term.reason = event_reason(hit->kind);
      finished = true;
      break;
    }

    raw_segments.push_back(seg);
    push_sample(t_new, y5);

    if (clamped_to_stop) {
      term = Termination::completed();
      term.reason = event_reason(EventKind::StopAtTau);
      finished = true;
      break;
    }

    if (want_pole &&
        (std::abs(y5[0]) > spec.pole_threshold || std::abs(y5[2]) > spec.pole_threshold) &&
        pole_signature(y5, sgn)) {
      term = Termination::pole_at(refine_pole(out.tau, out.phi, spec.m, sgn));
      term.reason = "pole guard";
      finished = true;
      break;
    }

    if (std::abs(t_new - start.tau) >= spec.max_span) {
      term = Termination::truncated("max_span reached without an event");
      finished = true;
      break;
    }

    t = t_new;
    y = y5;
    k[0] = k[6];  // FSAL
    const double fac = detail::dopri5_factor(err);
    h *= fac;
    if (std::abs(h) > spec.max_step) h = sgn * spec.max_step;
  }

  if (direction == Direction::Left) {
    std::reverse(out.tau.begin(), out.tau.end());
    std::reverse(out.phi.begin(), out.phi.end());
    std::reverse(out.dphi.begin(), out.dphi.end());
    std::reverse(out.ddphi.begin(), out.ddphi.end());
    out.segments.reserve(raw_segments.size());
    for (auto it = raw_segments.rbegin(); it != raw_segments.rend(); ++it) {
      out.segments.push_back(reverse_segment(*it));
    }
  } else {
    out.segments = std::move(raw_segments);
  }
  out.termination = term;
  out.validate();
  return out;
}

double locate_event(const Profile& profile, const Event& event,
                    const IntegrationSpec& spec) {
  profile.validate();
  switch (event.kind) {
    case EventKind::StopAtTau:
      if (!profile.covers(event.value)) {
        fail(ErrorCode::BracketLost, "profile does not reach the requested tau");
      }
      return event.value;
    case EventKind::PoleGuard:
      if (profile.termination.kind != TerminationKind::PoleAt) {
        fail(ErrorCode::BracketLost, "profile did not terminate at a pole");
      }
      return profile.termination.tau_p;
    default:
      break;
  }

  const int comp = event_component(event.kind);
  const std::vector<double>* arr[3] = {&profile.phi, &profile.dphi, &profile.ddphi};
  const std::vector<double>& g = *arr[comp];
  if (g.front() == 0.0) return profile.tau.front();
  auto f = [&spec](double, const Vec<3>& y) -> Vec<3> {
    OdeState s{0.0, y[0], y[1], y[2]};
    const auto d = rhs(spec.m, s);
    return {d[0], d[1], d[2]};
  };
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (g[i] * g[i + 1] < 0.0 || g[i + 1] == 0.0) {
      double lo = profile.tau[i], hi = profile.tau[i + 1];
      double glo = g[i];
      double mid = 0.5 * (lo + hi);
      for (int it = 0; it < 100 && hi - lo > 0.0; ++it) {
        mid = 0.5 * (lo + hi);
        const Triple tr = profile.eval(mid);
        const double vals[3] = {tr.phi, tr.dphi, tr.ddphi};
        const double gm = vals[comp];
        if (gm == 0.0) break;
        if (glo * gm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          glo = gm;
        }
      }
      // Polish with a fifth-order substep from the left bracket sample
      // (profile samples are accepted integration steps).
      const Vec<3> y0{profile.phi[i], profile.dphi[i], profile.ddphi[i]};
      return refine_crossing(f, profile.tau[i], y0, comp, mid, profile.tau[i],
                             profile.tau[i + 1])
          .first;
    }
  }
  fail(ErrorCode::BracketLost,
       std::string("profile never brackets ") + event_kind_name(event.kind));
}

}  // namespace mixlayer::integrator
