#pragma once

#include "swabsim/corridor.hpp"
#include "swabsim/swab.hpp"
#include "swabsim/types.hpp"

#include <vector>

namespace swabsim {

/// logistic sigmoid 1/(1+e^-x)
inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// 1 - logistic(x), computed as logistic(-x) so it underflows gracefully
/// instead of rounding to zero near saturation.
inline double logistic_complement(double x) { return 1.0 / (1.0 + std::exp(std::min(x, 700.0))); }

/// Insertion trajectory parameters: straight travel chi at the entry angle,
/// then aim at the point (e1, e2) on the nasopharynx ellipse. Defaults are
/// the strain-optimised values for the built-in corridors (aiming slightly
/// above the nasopharynx centre keeps the shaft off the vestibule rim).
struct TrajParams {
  double chi = 0.0173;  // m
  double e1 = 0.0;      // m, horizontal ellipse coordinate
  double e2 = 0.0042;   // m, vertical ellipse coordinate

  static constexpr double kChiMax = 0.04;
  // ellipse semi-axes at the nasopharynx plane
  static constexpr double kSemiAxis1 = 0.010;
  static constexpr double kSemiAxis2 = 0.006;

  /// > 0 outside the feasible box / ellipse; 0 when feasible.
  double constraint_violation() const;
  bool feasible() const { return constraint_violation() == 0.0; }
};

/// Time-indexed tip poses in the nostril frame. The three parts (advance,
/// turn, drive to the nasopharynx) are each velocity-ramped triangularly so
/// part boundaries start and end at rest.
struct WaypointTrack {
  std::vector<double> times;
  std::vector<Pose6> poses;          // tip pose, nostril frame
  std::array<double, 3> part_boundaries{};
  double total_duration = 20.0;

  const Pose6& start() const { return poses.front(); }
};

/// Durations of the three parts; sums to the 20 s track duration.
inline constexpr double kPartDurations[3] = {3.0, 3.0, 14.0};
inline constexpr double kPartIiiLength = 0.150;  // m

/// Build the three-part track through the corridor. Throws
/// std::invalid_argument for parameters outside bounds or an ellipse target
/// behind the turn point.
WaypointTrack build_waypoints(const TrajParams& p, const NasalCorridor& corridor,
                              int waypoints_per_part = 200);

/// Progress variable along the track with force-based slowdown.
struct TrackCursor {
  double l = 0.0;
  bool finished = false;
};

inline constexpr double kSlowdownScale = 60.0;      // 1/N
inline constexpr double kSlowdownIntercept = 0.5;   // N

/// dl/dt = 1 - logistic(s_l (f_z - fbar_l)); l is clamped to the duration.
TrackCursor advance_cursor(const TrackCursor& c, double f_z, double dt, double duration);

/// Interpolated tip pose at progress l: linear in position, spherical-linear
/// in orientation, clamped to the track ends.
Pose6 target_at(const WaypointTrack& track, double l);

/// Elastic energy of one penetrating contact.
inline double strain_energy_term(double nu, double penetration) {
  return 0.5 * nu * penetration * penetration;
}

/// Quasi-static strain-energy estimate of a candidate trajectory: sweep the
/// track, and at each sample accumulate 1/2 nu d^2 for every shaft segment
/// penetrating the corridor wall by d. The sweep stops once the tip reaches
/// the nasopharynx plane.
double strain_energy(const TrajParams& p, const NasalCorridor& corridor, const SwabBeam& swab,
                     int trajectory_samples = 50, int shaft_segments = 20);

/// Minimise strain energy over (chi, e1, e2) with a derivative-free simplex
/// search; bound violations are penalised. Never returns a point worse than
/// the initial one.
TrajParams optimize_trajectory(const TrajParams& initial, const NasalCorridor& corridor,
                               const SwabBeam& swab);

/// Orientation whose z axis points along dir with zero roll about it
/// (y stays as horizontal as possible).
Quat direction_to_quat(const Vec3& dir);

}  // namespace swabsim
