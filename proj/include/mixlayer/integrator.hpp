#pragma once

#include "mixlayer/core_types.hpp"

#include <array>
#include <vector>

namespace mixlayer::integrator {

enum class Direction { Left, Right };

// Conditions that end an integration run. The zero-crossing kinds watch the
// corresponding state component; PoleGuard watches for the universal blow-up
// signature; StopAtTau lands exactly on a prescribed abscissa.
enum class EventKind { PhiZero, DPhiZero, DDPhiZero, PoleGuard, StopAtTau };

const char* event_kind_name(EventKind kind);

struct Event {
  EventKind kind = EventKind::StopAtTau;
  double value = 0.0;  // target abscissa, StopAtTau only

  static Event phi_zero() { return {EventKind::PhiZero, 0.0}; }
  static Event dphi_zero() { return {EventKind::DPhiZero, 0.0}; }
  static Event ddphi_zero() { return {EventKind::DDPhiZero, 0.0}; }
  static Event pole_guard() { return {EventKind::PoleGuard, 0.0}; }
  static Event stop_at(double tau) { return {EventKind::StopAtTau, tau}; }
};

struct OdeState {
  double tau = 0.0;
  double z1 = 0.0;  // phi
  double z2 = 0.0;  // phi'
  double z3 = 0.0;  // phi''
};

struct IntegrationSpec {
  MValue m = MValue::finite(1.0);
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  std::vector<Event> events;
  double pole_threshold = 1e6;
  // Safety net: a run that triggers no event is returned Truncated once it has
  // covered this much of the axis.
  double max_span = 1000.0;

  void validate() const;  // throws DomainError on out-of-range settings
};

// First-order form of the profile equation: (z1,z2,z3) = (phi, phi', phi'').
std::array<double, 3> rhs(const MValue& m, const OdeState& state);

// Adaptive integration until the first triggered event. The returned profile
// is always stored with increasing tau (leftward runs are reversed) and its
// termination identifies what ended the run:
//   Completed, reason "stop_at_tau" | "phi_zero" | "dphi_zero" | "ddphi_zero"
//   PoleAt(tau_p)  for PoleGuard, with tau_p refined by a reciprocal fit
//   Truncated      when max_span or the step budget ran out first
// Throws StepUnderflow if the step collapses below 1e-14 without an event,
// NonFinite if the state leaves the representable range.
Profile integrate(const OdeState& start, Direction direction, const IntegrationSpec& spec);

// Finds the first tau (in increasing order) at which the event condition holds
// on an already-computed profile. The IntegrationSpec supplies the right-hand side (m)
// and tolerances used to sharpen the crossing beyond interpolant accuracy.
// Throws BracketLost when the profile never brackets the event.
double locate_event(const Profile& profile, const Event& event,
                    const IntegrationSpec& spec);

}  // namespace mixlayer::integrator
