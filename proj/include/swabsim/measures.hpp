#pragma once

#include "swabsim/record.hpp"

#include <optional>
#include <vector>

namespace swabsim {

/// The seven per-trial measures: insertion-window force means, time to the
/// nasopharynx, arrival flag, collection-window force means, and the
/// oscillation coefficient. Window measures are absent for trials that never
/// entered the corresponding stage.
struct MeasureSet {
  std::optional<double> s1_transverse;  // N, mean ||(Fx,Fy)|| over insertion
  std::optional<double> s1_axial;       // N, mean |Fz| over insertion
  std::optional<double> time_to_np;     // s, defined only when reached
  bool reached = false;
  std::optional<double> s2_transverse;
  std::optional<double> s2_axial;
  std::optional<double> oscillation;  // N, in-band spectral sum
};

/// Sum of DFT magnitude bins with frequency in [0.5, 5] Hz inclusive.
/// Requires at least two seconds of samples.
double oscillation_coefficient(const std::vector<double>& series, double rate_hz);

inline constexpr double kOscBandLow = 0.5;   // Hz
inline constexpr double kOscBandHigh = 5.0;  // Hz
inline constexpr double kOscMinSeconds = 2.0;

MeasureSet compute_measures(const TrialRecord& rec);

}  // namespace swabsim
