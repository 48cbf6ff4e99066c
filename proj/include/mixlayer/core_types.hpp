// Core domain types shared by every mixlayer solver: the similarity exponent
// (with its infinite limit as an explicit tagged state), the solver parameter
// bundle, regime classification, the error taxonomy, and sampled solution
// profiles with dense-output interpolation.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mixlayer {

// ---------------------------------------------------------------------------
// Error taxonomy. Codes group into CLI exit classes:
//   domain/regime misuse -> 2, convergence failures -> 3, file I/O -> 4.
enum class ErrorCode {
  DomainError,
  RegimeUnsupported,
  OutOfDomain,
  UndefinedAtPole,
  NoManifoldForm,
  OutsideLocalRadius,
  OutOfWindow,
  SeedOnStagnation,
  InvalidDoc,
  SchemaMismatch,
  DivergenceSuspected,
  TailTooLarge,
  StepUnderflow,
  NonFinite,
  BracketLost,
  NoConvergence,
  PoleBeforeOrigin,
  FarFieldNotReached,
  IoError,
};

const char* error_code_name(ErrorCode code);

// Exit class for the CLI: 2 = domain, 3 = convergence, 4 = io.
int error_exit_class(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

// ---------------------------------------------------------------------------
// Similarity exponent m > 0. The m -> infinity limit is a tagged state so the
// structurally different limit formulas live on explicit branches instead of
// large-number hacks. Values within 1e-12 of the regime boundaries 1/3, 1/2
// are snapped onto them and carry a diagnostic note.
class MValue {
 public:
  static MValue finite(double value);
  static MValue infinite();
  // Accepts "inf"/"infinity" (case-insensitive) or a positive decimal.
  static MValue parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  // Finite value; must not be called on the infinite tag.
  double value() const;
  // Coefficient (m-1)/m of the quadratic term in the similarity ODE; 1 in the
  // infinite limit.
  double quad_coeff() const noexcept;
  // Coefficient (2m-1)/m of the integral term in the conservation identity;
  // 2 in the infinite limit.
  double integral_coeff() const noexcept;
  // Diagnostic note attached when the input was snapped to a regime boundary.
  const std::string& note() const noexcept { return note_; }
  bool snapped() const noexcept { return !note_.empty(); }

  std::string str() const;  // "inf" or decimal text

  friend bool operator==(const MValue& a, const MValue& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  MValue() = default;
  double value_ = 0.0;
  bool infinite_ = false;
  std::string note_;
};

// ---------------------------------------------------------------------------
// Solvability regime over m. Partition of (0, inf]:
//   (0,1/3)   no boundary-value solution exists
//   [1/3,1/2) solution exists on R- but blows up at a finite pole on R+
//   {1/2}     bounded global solution (flooded-jet boundary case)
//   (1/2,inf) global solution with power-law far field (full IBVP solvable)
//   {inf}     exact exponential limit family (separation case)
enum class Regime {
  NoBvpSolution,
  PoleBoundedBvp,
  FloodedJetBoundary,
  GlobalIbvp,
  SeparationLimit,
};

const char* regime_name(Regime r);
Regime classify_regime(const MValue& m);

// ---------------------------------------------------------------------------
// Parameter bundle used across solvers.
struct Params {
  MValue m = MValue::finite(1.0);
  double a = 1.0;               // equilibrium depth, a > 0
  std::optional<double> b;      // far-field coefficient, > 0 when present
  std::optional<double> d;      // stable-manifold series parameter
  double nu = 1.0;              // kinematic viscosity, > 0
  double T = 7.0;               // left cutoff: series handoff at tau = -T
};

// Checks invariants and fills defaults (nu=1, T=7). `required` lists field
// names ("m","a","b","d") that must have been set by the caller.
Params validate_params(Params p, const std::vector<std::string>& required);

// ---------------------------------------------------------------------------
// Sampled trajectory of (phi, phi', phi'') over a strictly increasing tau
// grid, with per-step dense-output coefficients so the profile can be
// evaluated anywhere inside its span.
enum class TerminationKind { Completed, PoleAt, Truncated };

struct Termination {
  TerminationKind kind = TerminationKind::Completed;
  double tau_p = std::numeric_limits<double>::quiet_NaN();  // PoleAt only
  std::string reason;                                       // Truncated only

  static Termination completed() { return {}; }
  static Termination pole_at(double tau_p) {
    Termination t;
    t.kind = TerminationKind::PoleAt;
    t.tau_p = tau_p;
    return t;
  }
  static Termination truncated(std::string reason) {
    Termination t;
    t.kind = TerminationKind::Truncated;
    t.reason = std::move(reason);
    return t;
  }
};

struct Triple {
  double phi = 0.0;
  double dphi = 0.0;
  double ddphi = 0.0;
};

// Dense-output coefficients for one accepted integrator step covering
// [tau0, tau0+h] (h may be negative). Interpolates the three state
// components to the same order as the integrator.
struct DenseSegment {
  double tau0 = 0.0;
  double h = 0.0;
  std::array<std::array<double, 3>, 5> rcont{};  // contiguous-output coefficients

  std::array<double, 3> eval(double tau) const;
};

struct Profile {
  std::vector<double> tau;    // strictly increasing
  std::vector<double> phi;
  std::vector<double> dphi;
  std::vector<double> ddphi;
  Termination termination;
  std::vector<DenseSegment> segments;  // empty when built without dense output

  std::size_t size() const noexcept { return tau.size(); }
  double tau_front() const { return tau.front(); }
  double tau_back() const { return tau.back(); }
  bool covers(double t) const {
    return !tau.empty() && t >= tau.front() && t <= tau.back();
  }

  // Dense evaluation; requires segments and tau inside the span.
  Triple eval(double t) const;

  // Throws on violated structural invariants (lengths, ordering, finiteness,
  // samples beyond a recorded pole).
  void validate() const;
};

}  // namespace mixlayer
