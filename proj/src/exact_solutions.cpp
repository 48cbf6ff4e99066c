#include "mixlayer/exact_solutions.hpp"

#include <cmath>
#include <string>

namespace mixlayer::exact {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// Offset between the shift convention of the two-parameter m=1/3 family and
// the peak-at-zero normalization: the peak sits at tau_s - sqrt(3)pi/(6a).
double bvp_offset(double a) { return kSqrt3 * M_PI / (6.0 * a); }

double implicit13_pole_bvp(double a) { return 2.0 * kSqrt3 * M_PI / (3.0 * a); }

void check_amp(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    fail(ErrorCode::DomainError, "amplitude parameter a must be positive");
  }
}

// Derivative chains of the bounded m=1/3 solution in u = sqrt(-phi),
// A = a^{3/2}. Branch 1 rises toward the peak, branch 2 falls to the pole.
Triple implicit13_triple(double a, double u, int branch) {
  const double A = std::pow(a, 1.5);
  const double u3 = u * u * u;
  Triple t;
  t.phi = -u * u;
  if (branch == 1) {
    t.dphi = (2.0 / 3.0) * u * (A - u3);
    t.ddphi = -(2.0 / 9.0) * (A - u3) * (A - 4.0 * u3);
  } else {
    t.dphi = -(2.0 / 3.0) * u * (A + u3);
    t.ddphi = -(2.0 / 9.0) * (A + u3) * (A + 4.0 * u3);
  }
  return t;
}

double implicit13_dddphi(double a, double u, int branch) {
  const double A = std::pow(a, 1.5);
  const double u3 = u * u * u;
  if (branch == 1) return -(2.0 / 9.0) * u * u * (A - u3) * (5.0 * A - 8.0 * u3);
  return -(2.0 / 9.0) * u * u * (A + u3) * (5.0 * A + 8.0 * u3);
}

// Solves the implicit relation on the BVP axis (peak at tau = 0) for
// u = sqrt(-phi), returning the branch used.
std::pair<double, int> implicit13_solve_u(double a, double tau) {
  const double tau_p = implicit13_pole_bvp(a);
  if (!(tau < tau_p)) {
    fail(ErrorCode::OutOfDomain, "bounded m=1/3 solution is undefined at tau >= " +
                                     std::to_string(tau_p));
  }
  if (tau <= 0.0) {
    // Rising branch, u in [0, sqrt(a)). Deep in the tail the relation
    // underflows; switch to the manifold representation there.
    if (tau * a < -34.0) {
      const double d = 2.0 * kSqrt3 * a * std::exp(kSqrt3 * M_PI / 6.0);
      const double phi = -a + d * std::exp(a * tau);
      return {std::sqrt(-phi), 1};
    }
    double lo = 0.0, hi = std::sqrt(a) * (1.0 - 1e-16);
    // tau decreases in u on this branch.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (implicit13_tau(a, mid, 1) > tau) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return {0.5 * (lo + hi), 1};
  }
  // Falling branch, u in [0, inf); tau increases in u.
  double lo = 0.0, hi = std::sqrt(a);
  while (implicit13_tau(a, hi, 2) < tau) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (implicit13_tau(a, mid, 2) < tau) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), 2};
}

}  // namespace

const char* exact_family_name(ExactFamily f) {
  switch (f) {
    case ExactFamily::Tanh: return "Tanh";
    case ExactFamily::Linear: return "Linear";
    case ExactFamily::Quadratic: return "Quadratic";
    case ExactFamily::Exponential: return "Exponential";
    case ExactFamily::Implicit13: return "Implicit13";
    case ExactFamily::BlowupPole: return "BlowupPole";
    case ExactFamily::BlowupCoth: return "BlowupCoth";
  }
  return "?";
}

ExactKind ExactKind::tanh_profile(double a, double tau_s) {
  check_amp(a);
  return {ExactFamily::Tanh, MValue::finite(0.5), a, tau_s};
}
ExactKind ExactKind::linear(double a, double tau_s) {
  check_amp(a);
  return {ExactFamily::Linear, MValue::finite(1.0), a, tau_s};
}
ExactKind ExactKind::quadratic(double a, double tau_s) {
  check_amp(a);
  return {ExactFamily::Quadratic, MValue::finite(2.0), a, tau_s};
}
ExactKind ExactKind::exponential(double a, double tau_s) {
  check_amp(a);
  return {ExactFamily::Exponential, MValue::infinite(), a, tau_s};
}
ExactKind ExactKind::implicit13(double a, double tau_s) {
  check_amp(a);
  return {ExactFamily::Implicit13, MValue::finite(1.0 / 3.0), a, tau_s};
}
ExactKind ExactKind::implicit13_bvp(double a) { return implicit13(a, bvp_offset(a)); }
ExactKind ExactKind::blowup_pole(const MValue& m, double tau_p) {
  return {ExactFamily::BlowupPole, m, 1.0, tau_p};
}
ExactKind ExactKind::blowup_coth(double a, double tau_p) {
  check_amp(a);
  return {ExactFamily::BlowupCoth, MValue::finite(0.5), a, tau_p};
}

bool ExactKind::is_singular() const {
  return family == ExactFamily::BlowupPole || family == ExactFamily::BlowupCoth;
}

double ExactKind::pole_tau() const {
  switch (family) {
    case ExactFamily::BlowupPole:
    case ExactFamily::BlowupCoth:
      return shift;
    case ExactFamily::Implicit13:
      // Pole of the BVP-normalized solution, moved by the shift convention.
      return shift - bvp_offset(a) + implicit13_pole_bvp(a);
    default:
      fail(ErrorCode::DomainError,
           std::string(exact_family_name(family)) + " has no pole");
  }
}

double implicit13_tau(double a, double u, int branch) {
  check_amp(a);
  if (branch != 1 && branch != 2) {
    fail(ErrorCode::DomainError, "implicit13_tau branch must be 1 or 2");
  }
  const double ra = std::sqrt(a);
  const double s = branch == 1 ? 1.0 : -1.0;  // sign of the sqrt(-a*phi) terms
  if (branch == 1 && !(u < ra)) {
    fail(ErrorCode::OutOfDomain, "branch 1 requires u < sqrt(a)");
  }
  if (u < 0.0) fail(ErrorCode::OutOfDomain, "u must be nonnegative");
  const double num = a + s * ra * u + u * u;
  const double den = (ra - s * u) * (ra - s * u);
  return kSqrt3 * M_PI / (6.0 * a) - std::log(num / den) / (2.0 * a) -
         (kSqrt3 / a) * std::atan((ra + s * 2.0 * u) / (kSqrt3 * ra));
}

double eval_implicit_13(double a, double tau) {
  check_amp(a);
  const auto [u, branch] = implicit13_solve_u(a, tau);
  (void)branch;
  return -u * u;
}

Triple eval_exact(const ExactKind& kind, double tau) {
  const double a = kind.a;
  const double t = tau - kind.shift;
  switch (kind.family) {
    case ExactFamily::Tanh: {
      const double u = a * t / 2.0;
      const double th = std::tanh(u);
      const double s2 = 1.0 - th * th;  // sech^2
      return {a * th, a * a / 2.0 * s2, -a * a * a / 2.0 * s2 * th};
    }
    case ExactFamily::Linear:
      return {a * t, a, 0.0};
    case ExactFamily::Quadratic:
      return {a * t * t, 2.0 * a * t, 2.0 * a};
    case ExactFamily::Exponential: {
      const double e = std::exp(a * t);
      return {a * (e - 1.0), a * a * e, a * a * a * e};
    }
    case ExactFamily::Implicit13: {
      const double tb = t + bvp_offset(a);  // to the peak-at-zero axis
      const auto [u, branch] = implicit13_solve_u(a, tb);
      return implicit13_triple(a, u, branch);
    }
    case ExactFamily::BlowupPole: {
      if (t == 0.0) fail(ErrorCode::UndefinedAtPole, "blow-up pole at tau = shift");
      const double c =
          kind.m.is_infinite() ? 6.0 : 6.0 * kind.m.value() / (kind.m.value() + 1.0);
      return {c / t, -c / (t * t), 2.0 * c / (t * t * t)};
    }
    case ExactFamily::BlowupCoth: {
      const double u = a * t / 2.0;
      if (u == 0.0) fail(ErrorCode::UndefinedAtPole, "coth profile pole at tau = shift");
      const double ch = std::cosh(u), sh = std::sinh(u);
      const double cth = ch / sh;
      const double csch2 = 1.0 / (sh * sh);
      return {a * cth, -a * a / 2.0 * csch2, a * a * a / 2.0 * csch2 * cth};
    }
  }
  fail(ErrorCode::DomainError, "unknown exact family");
}

double eval_exact_dddphi(const ExactKind& kind, double tau) {
  const double a = kind.a;
  const double t = tau - kind.shift;
  switch (kind.family) {
    case ExactFamily::Tanh: {
      const double u = a * t / 2.0;
      const double th = std::tanh(u);
      const double s2 = 1.0 - th * th;
      return -std::pow(a, 4) / 4.0 * s2 * (s2 - 2.0 * th * th);
    }
    case ExactFamily::Linear:
    case ExactFamily::Quadratic:
      return 0.0;
    case ExactFamily::Exponential:
      return std::pow(a, 4) * std::exp(a * t);
    case ExactFamily::Implicit13: {
      const double tb = t + bvp_offset(a);
      const auto [u, branch] = implicit13_solve_u(a, tb);
      return implicit13_dddphi(a, u, branch);
    }
    case ExactFamily::BlowupPole: {
      if (t == 0.0) fail(ErrorCode::UndefinedAtPole, "blow-up pole at tau = shift");
      const double c =
          kind.m.is_infinite() ? 6.0 : 6.0 * kind.m.value() / (kind.m.value() + 1.0);
      return -6.0 * c / std::pow(t, 4);
    }
    case ExactFamily::BlowupCoth: {
      const double u = a * t / 2.0;
      if (u == 0.0) fail(ErrorCode::UndefinedAtPole, "coth profile pole at tau = shift");
      const double ch = std::cosh(u), sh = std::sinh(u);
      const double cth = ch / sh;
      const double csch2 = 1.0 / (sh * sh);
      return -std::pow(a, 4) / 4.0 * csch2 * (2.0 * cth * cth + csch2);
    }
  }
  fail(ErrorCode::DomainError, "unknown exact family");
}

double lyapunov_parameter(const ExactKind& kind) {
  const double a = kind.a;
  switch (kind.family) {
    case ExactFamily::Tanh:
      return 2.0 * a * std::exp(-a * kind.shift);
    case ExactFamily::Exponential:
      return a * std::exp(-a * kind.shift);
    case ExactFamily::Implicit13:
      return 2.0 * kSqrt3 * a * std::exp(kSqrt3 * M_PI / 3.0 - a * kind.shift);
    case ExactFamily::BlowupCoth:
      return -2.0 * a * std::exp(-a * kind.shift);
    default:
      fail(ErrorCode::NoManifoldForm,
           std::string(exact_family_name(kind.family)) +
               " does not approach the equilibrium along the stable manifold");
  }
}

const char* preset_name_str(PresetName name) {
  switch (name) {
    case PresetName::FloodedJet: return "FloodedJet";
    case PresetName::Separation: return "Separation";
    case PresetName::NearWallJet: return "NearWallJet";
  }
  return "?";
}

FlowFormulas preset_problem(PresetName name, double a, double nu) {
  check_amp(a);
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    fail(ErrorCode::DomainError, "kinematic viscosity nu must be positive");
  }
  FlowFormulas f;
  f.name = name;
  f.a = a;
  f.nu = nu;
  switch (name) {
    case PresetName::FloodedJet: {
      f.m = MValue::finite(0.5);
      auto tau_of = [nu](double x, double y) {
        if (!(x > 0.0)) fail(ErrorCode::OutOfDomain, "flooded jet requires x > 0");
        return y / (std::sqrt(3.0 * nu) * std::pow(x, 2.0 / 3.0));
      };
      auto phi = [a](double t) { return a * std::tanh(a * t / 2.0); };
      auto dphi = [a](double t) {
        const double th = std::tanh(a * t / 2.0);
        return a * a / 2.0 * (1.0 - th * th);
      };
      f.psi = [=](double x, double y) {
        return std::sqrt(3.0 * nu) * std::pow(x, 1.0 / 3.0) * phi(tau_of(x, y));
      };
      f.u = [=](double x, double y) {
        return std::pow(x, -1.0 / 3.0) * dphi(tau_of(x, y));
      };
      f.v = [=](double x, double y) {
        const double t = tau_of(x, y);
        return 2.0 * std::sqrt(nu / 3.0) * std::pow(x, -2.0 / 3.0) *
               (t * dphi(t) - phi(t) / 2.0);
      };
      break;
    }
    case PresetName::Separation: {
      f.m = MValue::infinite();
      const double rnu = std::sqrt(nu);
      auto checkx = [](double x) {
        if (!(x >= 0.0)) fail(ErrorCode::OutOfDomain, "separation flow requires x >= 0");
      };
      f.psi = [=](double x, double y) {
        checkx(x);
        return a * rnu * x * (std::exp(a * y / rnu) - 1.0);
      };
      f.u = [=](double x, double y) {
        checkx(x);
        return a * a * x * std::exp(a * y / rnu);
      };
      f.v = [=](double x, double y) {
        checkx(x);
        return a * rnu * (1.0 - std::exp(a * y / rnu));
      };
      break;
    }
    case PresetName::NearWallJet: {
      f.m = MValue::finite(1.0 / 3.0);
      const double rnu = std::sqrt(nu);
      auto tau_of = [rnu](double x, double y) {
        if (!(x > 0.0)) fail(ErrorCode::OutOfDomain, "near-wall jet requires x > 0");
        return y / (2.0 * rnu * std::pow(x, 3.0 / 4.0));
      };
      // Reflected bounded profile: phi~(tau) = -phi(-tau), phi~' = phi'(-tau).
      const ExactKind base = ExactKind::implicit13_bvp(a);
      auto refl = [base](double t) {
        const Triple tr = eval_exact(base, -t);
        return Triple{-tr.phi, tr.dphi, -tr.ddphi};
      };
      f.psi = [=](double x, double y) {
        return 2.0 * rnu * std::pow(x, 0.25) * refl(tau_of(x, y)).phi;
      };
      f.u = [=](double x, double y) {
        return std::pow(x, -0.5) * refl(tau_of(x, y)).dphi;
      };
      f.v = [=](double x, double y) {
        const double t = tau_of(x, y);
        const Triple tr = refl(t);
        return 1.5 * rnu * std::pow(x, -0.75) * (t * tr.dphi - tr.phi / 3.0);
      };
      break;
    }
  }
  return f;
}

}  // namespace mixlayer::exact
