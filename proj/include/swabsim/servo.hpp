#pragma once

#include "swabsim/rng.hpp"
#include "swabsim/types.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace swabsim {

/// Raised when too few usable fiducials remain for a pose fix.
class EstimationUnavailable : public std::runtime_error {
 public:
  explicit EstimationUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct ServoGains {
  double lambda0 = 2.5;        // 1/s, gain at zero error
  double lambda0_slope = 30.0; // gain slope magnitude at zero error
  double lambda_inf = 0.5;     // 1/s, gain for large errors
  Vec3 lambda_vs{0.2, 0.2, 0.9};  // N^-1 m/s, force repulsion gains
  double alpha1 = 0.75;        // 1/s, fast low-pass
  double alpha2 = 0.6;         // 1/s, slow low-pass
  double converge_pos = 0.002;            // m
  double converge_angle = 2.0 * M_PI / 180.0;  // rad
};

/// Filtered nostril pose with staleness tracking. Estimates older than
/// kMaxAge are invalid and must not drive the controller.
struct PoseEstimate {
  Pose6 pose;
  bool valid = false;
  double age = 0.0;  // s since the last accepted measurement

  static constexpr double kMaxAge = 1.0;
  static constexpr double kBlend = 0.3;  // per vision frame
};

/// Simulated fiducial detector: independent per-marker dropout, isotropic
/// gaussian noise on survivors. Returns (marker index, measured point).
std::vector<std::pair<int, Vec3>> measure_fiducials(const std::array<Vec3, 5>& true_points,
                                                    double noise_sigma, double dropout_prob,
                                                    RngStream& rng);

/// Rigid registration (rotation + translation, no scale) of measured markers
/// against their reference positions; least squares via SVD with the proper
/// rotation constraint. Throws EstimationUnavailable with fewer than three
/// usable, non-collinear correspondences.
Pose6 register_pose(const std::vector<std::pair<int, Vec3>>& measured,
                    const std::array<Vec3, 5>& reference);

/// Exponential pose blend with coasting. With a measurement the estimate
/// moves kBlend of the way toward it (translation linear, orientation
/// geodesic); without one it is held in the world frame and ages out after
/// kMaxAge. World-frame estimates need no ego-motion compensation, so
/// ee_motion is accepted for interface parity but unused.
PoseEstimate filter_pose(const PoseEstimate& prev, const std::optional<Pose6>& meas,
                         const Twist6& ee_motion, double dt);

/// Adaptive servo gain: lambda(e) decays exponentially from lambda0 toward
/// lambda_inf with initial slope -lambda0_slope.
double adaptive_gain(double error_norm, const ServoGains& g = {});

/// Two low-pass filters whose difference forms a band-pass force response:
/// spikes on contact, fades on steady load.
struct BandpassState {
  Vec3 f1{Vec3::Zero()};
  Vec3 f2{Vec3::Zero()};
};

/// Advance both filters and return the repulsion velocity
/// lambda_vs .* (f1 - f2). Feed the force acting on the swab so the repulsion
/// points away from the contact.
std::pair<BandpassState, Vec3> bandpass_step(const BandpassState& state, const Vec3& force,
                                             double dt, const ServoGains& g = {});

/// Pose-based visual servo command toward the estimated target, with the
/// band-pass repulsion added to the translation. Invalid estimates hold
/// position.
Twist6 servo_step(const PoseEstimate& est, const Pose6& tip_pose, const Vec3& repel, double dt,
                  const ServoGains& g = {});

/// Position error below converge_pos and orientation error below
/// converge_angle.
bool servo_converged(const PoseEstimate& est, const Pose6& tip_pose, const ServoGains& g = {});

}  // namespace swabsim
