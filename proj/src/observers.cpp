#include "swabsim/observers.hpp"

#include "swabsim/trajectory.hpp"  // logistic()

#include <cmath>
#include <stdexcept>

namespace swabsim {

double sigmoid_tanh(double x) { return (std::tanh(x / 2.0) + 1.0) / 2.0; }

bool sigmoid_equivalence_check(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("sigmoid_equivalence_check: x must be finite");
  return std::abs(sigmoid_tanh(x) - logistic(x)) < 1e-12;
}

FuzzyDecision fuzzy_eval(double p, double f_z, const FuzzyParams& params) {
  if (p < 0.0) throw std::invalid_argument("fuzzy_eval: displacement must be >= 0");
  const double sp = sigmoid_tanh(params.s_p * (p - params.i_p));
  const double sf = sigmoid_tanh(params.s_f * (f_z - params.i_f));
  FuzzyDecision d;
  d.output = sp * sf;
  d.triggered = d.output >= params.threshold;
  return d;
}

const char* abort_kind_name(AbortKind k) {
  switch (k) {
    case AbortKind::Wedge: return "Wedge";
    case AbortKind::Overload: return "Overload";
    case AbortKind::Manual: return "Manual";
  }
  return "?";
}

std::optional<AbortEvent> safety_check(double tip_depth, const ForceSample& force,
                                       const SafetyParams& params, bool manual_flag) {
  const double mag = force.f.norm();
  if (mag > params.max_force) return AbortEvent{AbortKind::Overload, force.t, tip_depth};
  if (mag > params.wedge_force && tip_depth < params.wedge_depth)
    return AbortEvent{AbortKind::Wedge, force.t, tip_depth};
  if (manual_flag) return AbortEvent{AbortKind::Manual, force.t, tip_depth};
  return std::nullopt;
}

}  // namespace swabsim
