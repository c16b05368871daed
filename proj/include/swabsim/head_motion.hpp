#pragma once

#include "swabsim/rng.hpp"
#include "swabsim/types.hpp"

#include <array>
#include <string>

namespace swabsim {

/// Mean-reverting stochastic process for one neck angle:
///   dv = (-mu (theta - setpoint) - psi v) dt + sqrt(2 psi) sigma dW
///   dtheta = v dt
/// Discretised with Euler-Maruyama, so the noise increment scales with
/// sqrt(dt) and the stationary statistics (Var theta = sigma^2/mu,
/// Var v = sigma^2) are step-size invariant. Amplitudes therefore depend only
/// on (sigma, psi, mu), not on the control rate.
struct OUParams {
  double sigma = 0.0;    // rad, noise scale
  double psi = 1.0;      // 1/s, velocity damping
  double mu = 1.0;       // 1/s^2, setpoint attraction
  double setpoint = 0.0; // rad
};

/// One Euler-Maruyama step; returns (theta', v').
std::pair<double, double> ou_step(double theta, double v, const OUParams& p, double dt,
                                  RngStream& rng);

enum class MotionLevel { None, Light, Medium, Heavy };

const char* motion_name(MotionLevel m);
MotionLevel parse_motion(const std::string& name);

/// Per-angle parameters (pitch, yaw, roll) for a named motion level.
/// Pitch holds at 0.4 rad, yaw and roll at zero.
std::array<OUParams, 3> motion_preset(MotionLevel level);
std::array<OUParams, 3> motion_preset(const std::string& name);

/// Virtual neck state: tracked angles, their velocities, and the stochastic
/// targets the tracking law chases.
struct NeckState {
  Vec3 angles{Vec3::Zero()};
  Vec3 velocities{Vec3::Zero()};
  Vec3 targets{Vec3::Zero()};
  Vec3 target_velocities{Vec3::Zero()};

  static constexpr double kAngleLimit = M_PI / 2.0;  // physiological clamp
};

/// First-order tracking of the targets: angles += dt * k * (targets - angles).
/// Angles are clamped to +-pi/2 with the associated velocity zeroed.
NeckState track_head(const NeckState& state, double k, double dt);

/// Advance the three OU targets by one step.
void advance_targets(NeckState& state, const std::array<OUParams, 3>& params, double dt,
                     RngStream& rng);

}  // namespace swabsim
