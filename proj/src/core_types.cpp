#include "mixlayer/core_types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace mixlayer {

namespace {

constexpr double kThird = 1.0 / 3.0;
constexpr double kBoundarySnap = 1e-12;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RegimeUnsupported: return "RegimeUnsupported";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::UndefinedAtPole: return "UndefinedAtPole";
    case ErrorCode::NoManifoldForm: return "NoManifoldForm";
    case ErrorCode::OutsideLocalRadius: return "OutsideLocalRadius";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::SeedOnStagnation: return "SeedOnStagnation";
    case ErrorCode::InvalidDoc: return "InvalidDoc";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DivergenceSuspected: return "DivergenceSuspected";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BracketLost: return "BracketLost";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PoleBeforeOrigin: return "PoleBeforeOrigin";
    case ErrorCode::FarFieldNotReached: return "FarFieldNotReached";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

int error_exit_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError:
    case ErrorCode::RegimeUnsupported:
    case ErrorCode::OutOfDomain:
    case ErrorCode::UndefinedAtPole:
    case ErrorCode::NoManifoldForm:
    case ErrorCode::OutsideLocalRadius:
    case ErrorCode::OutOfWindow:
    case ErrorCode::SeedOnStagnation:
    case ErrorCode::InvalidDoc:
    case ErrorCode::SchemaMismatch:
      return 2;
    case ErrorCode::DivergenceSuspected:
    case ErrorCode::TailTooLarge:
    case ErrorCode::StepUnderflow:
    case ErrorCode::NonFinite:
    case ErrorCode::BracketLost:
    case ErrorCode::NoConvergence:
    case ErrorCode::PoleBeforeOrigin:
    case ErrorCode::FarFieldNotReached:
      return 3;
    case ErrorCode::IoError:
      return 4;
  }
  return 3;
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

// ---------------------------------------------------------------------------
// MValue

MValue MValue::finite(double value) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::DomainError, "m must be finite (use MValue::infinite() for the limit case)");
  }
  if (value <= 0.0) {
    fail(ErrorCode::DomainError, "m must be positive, got " + std::to_string(value));
  }
  MValue m;
  m.value_ = value;
  // Snap onto the regime boundaries so classification is exact there.
  if (value != kThird && std::abs(value - kThird) < kBoundarySnap) {
    m.value_ = kThird;
    m.note_ = "m snapped to 1/3 (within 1e-12 of the regime boundary)";
  } else if (value != 0.5 && std::abs(value - 0.5) < kBoundarySnap) {
    m.value_ = 0.5;
    m.note_ = "m snapped to 1/2 (within 1e-12 of the regime boundary)";
  }
  return m;
}

MValue MValue::infinite() {
  MValue m;
  m.infinite_ = true;
  return m;
}

MValue MValue::parse(std::string_view text) {
  const std::string t = lower(text);
  if (t == "inf" || t == "infinity" || t == "+inf") return infinite();
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    // from_chars does not accept forms like "1/3"; support them since the
    // boundary values are naturally written as fractions.
    auto slash = t.find('/');
    if (slash != std::string::npos) {
      double num = 0.0, den = 0.0;
      auto r1 = std::from_chars(t.data(), t.data() + slash, num);
      auto r2 = std::from_chars(t.data() + slash + 1, t.data() + t.size(), den);
      if (r1.ec == std::errc() && r2.ec == std::errc() && den != 0.0) {
        return finite(num / den);
      }
    }
    fail(ErrorCode::DomainError, "cannot parse m value '" + std::string(text) + "'");
  }
  return finite(v);
}

double MValue::value() const {
  if (infinite_) {
    fail(ErrorCode::DomainError, "finite value requested from the infinite m tag");
  }
  return value_;
}

double MValue::quad_coeff() const noexcept {
  return infinite_ ? 1.0 : (value_ - 1.0) / value_;
}

double MValue::integral_coeff() const noexcept {
  return infinite_ ? 2.0 : (2.0 * value_ - 1.0) / value_;
}

std::string MValue::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

// ---------------------------------------------------------------------------
// Regime

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::NoBvpSolution: return "NoBvpSolution";
    case Regime::PoleBoundedBvp: return "PoleBoundedBvp";
    case Regime::FloodedJetBoundary: return "FloodedJetBoundary";
    case Regime::GlobalIbvp: return "GlobalIbvp";
    case Regime::SeparationLimit: return "SeparationLimit";
  }
  return "UnknownRegime";
}

Regime classify_regime(const MValue& m) {
  if (m.is_infinite()) return Regime::SeparationLimit;
  const double v = m.value();
  if (v < kThird) return Regime::NoBvpSolution;
  if (v < 0.5) return Regime::PoleBoundedBvp;
  if (v == 0.5) return Regime::FloodedJetBoundary;
  return Regime::GlobalIbvp;
}

// ---------------------------------------------------------------------------
// Params

Params validate_params(Params p, const std::vector<std::string>& required) {
  auto requires_field = [&](const char* name) {
    return std::find(required.begin(), required.end(), name) != required.end();
  };
  if (requires_field("b") && !p.b.has_value()) {
    fail(ErrorCode::DomainError, "missing required parameter b");
  }
  if (requires_field("d") && !p.d.has_value()) {
    fail(ErrorCode::DomainError, "missing required parameter d");
  }
  if (!(p.a > 0.0) || !std::isfinite(p.a)) {
    fail(ErrorCode::DomainError, "a must be positive, got " + std::to_string(p.a));
  }
  if (p.b.has_value() && (!(*p.b > 0.0) || !std::isfinite(*p.b))) {
    fail(ErrorCode::DomainError, "b must be positive, got " + std::to_string(*p.b));
  }
  if (p.d.has_value() && !std::isfinite(*p.d)) {
    fail(ErrorCode::DomainError, "d must be finite");
  }
  if (!(p.nu > 0.0) || !std::isfinite(p.nu)) {
    fail(ErrorCode::DomainError, "nu must be positive, got " + std::to_string(p.nu));
  }
  if (!(p.T >= 1.0) || !std::isfinite(p.T)) {
    fail(ErrorCode::DomainError, "T must be >= 1, got " + std::to_string(p.T));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Profile

std::array<double, 3> DenseSegment::eval(double t) const {
  // Contiguous-output polynomial of the embedded 5(4) pair:
  //   u(s) = r1 + s*(r2 + (1-s)*(r3 + s*(r4 + (1-s)*r5))),  s in [0,1].
  const double s = (t - tau0) / h;
  const double s1 = 1.0 - s;
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = rcont[0][i] +
             s * (rcont[1][i] + s1 * (rcont[2][i] + s * (rcont[3][i] + s1 * rcont[4][i])));
  }
  return out;
}

Triple Profile::eval(double t) const {
  if (segments.empty()) {
    fail(ErrorCode::DomainError, "profile has no dense-output segments");
  }
  if (!covers(t)) {
    fail(ErrorCode::OutOfDomain,
         "tau=" + std::to_string(t) + " outside profile span [" +
             std::to_string(tau.front()) + ", " + std::to_string(tau.back()) + "]");
  }
  // Binary search for the segment whose [tau0, tau0+h] contains t. Segments
  // are stored in increasing tau0 order (leftward runs are stored reversed).
  std::size_t lo = 0, hi = segments.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (segments[mid].tau0 <= t) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  // Allow the right endpoint of the last segment.
  const auto v = segments[lo].eval(t);
  return Triple{v[0], v[1], v[2]};
}

void Profile::validate() const {
  const std::size_t n = tau.size();
  if (n < 2) {
    fail(ErrorCode::InvalidDoc, "profile needs at least 2 samples");
  }
  if (phi.size() != n || dphi.size() != n || ddphi.size() != n) {
    fail(ErrorCode::InvalidDoc, "profile arrays must share length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(tau[i]) || !std::isfinite(phi[i]) || !std::isfinite(dphi[i]) ||
        !std::isfinite(ddphi[i])) {
      fail(ErrorCode::NonFinite, "profile contains non-finite samples");
    }
    if (i > 0 && !(tau[i] > tau[i - 1])) {
      fail(ErrorCode::InvalidDoc, "profile tau grid must be strictly increasing");
    }
  }
  // A recorded pole must lie strictly outside the sampled span (on either
  // side: rightward runs stop short of it, leftward runs start past it).
  if (termination.kind == TerminationKind::PoleAt &&
      !(termination.tau_p > tau.back() || termination.tau_p < tau.front())) {
    fail(ErrorCode::InvalidDoc, "profile samples must not reach the recorded pole");
  }
}

}  // namespace mixlayer
