#pragma once

#include "swabsim/types.hpp"

#include <optional>

namespace swabsim {

/// Nasopharynx arrival detector: fuzzy AND (product) of a displacement
/// sigmoid and an axial-force sigmoid, thresholded at 0.5. Intercepts are
/// where each sigmoid crosses 0.5, so a trigger needs both inputs pushed
/// past their intercepts.
struct FuzzyParams {
  double s_p = 19.04;       // 1/m
  double i_p = 0.08;        // m
  double s_f = 9.24;        // 1/N
  double i_f = 0.323;       // N
  double threshold = 0.5;
};

/// (tanh(x/2)+1)/2, identical to the logistic sigmoid.
double sigmoid_tanh(double x);

/// |tanh form - logistic form| < 1e-12 at x.
bool sigmoid_equivalence_check(double x);

struct FuzzyDecision {
  double output = 0.0;
  bool triggered = false;
};

/// p: tip displacement since insertion start (m); f_z: raw axial force (N).
FuzzyDecision fuzzy_eval(double p, double f_z, const FuzzyParams& params = {});

/// Contact-phase safety rules.
struct SafetyParams {
  double wedge_force = 0.5;   // N, spike limit near the entrance
  double wedge_depth = 0.040; // m, window where the wedge rule applies
  double max_force = 2.5;     // N, absolute limit
};

enum class AbortKind { Wedge, Overload, Manual };

const char* abort_kind_name(AbortKind k);

struct AbortEvent {
  AbortKind kind = AbortKind::Manual;
  double t = 0.0;
  double tip_depth = 0.0;
};

/// Evaluate the safety rules on one force sample. Overload outranks Wedge;
/// Manual fires only via the external flag. Returns the abort to latch, if
/// any.
std::optional<AbortEvent> safety_check(double tip_depth, const ForceSample& force,
                                       const SafetyParams& params = {}, bool manual_flag = false);

}  // namespace swabsim
