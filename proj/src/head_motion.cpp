#include "swabsim/head_motion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace swabsim {

std::pair<double, double> ou_step(double theta, double v, const OUParams& p, double dt,
                                  RngStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("ou_step: dt must be positive");
  const double drift = -p.mu * (theta - p.setpoint) - p.psi * v;
  double noise = 0.0;
  if (p.sigma > 0.0) noise = std::sqrt(2.0 * p.psi) * p.sigma * std::sqrt(dt) * rng.normal();
  const double v_next = v + dt * drift + noise;
  const double theta_next = theta + dt * v_next;
  return {theta_next, v_next};
}

const char* motion_name(MotionLevel m) {
  switch (m) {
    case MotionLevel::None: return "None";
    case MotionLevel::Light: return "Light";
    case MotionLevel::Medium: return "Medium";
    case MotionLevel::Heavy: return "Heavy";
  }
  return "?";
}

MotionLevel parse_motion(const std::string& name) {
  std::string l = name;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "none") return MotionLevel::None;
  if (l == "light") return MotionLevel::Light;
  if (l == "medium") return MotionLevel::Medium;
  if (l == "heavy") return MotionLevel::Heavy;
  throw std::invalid_argument("unknown motion preset '" + name + "'");
}

std::array<OUParams, 3> motion_preset(MotionLevel level) {
  double sigma = 0.0, psi = 1.0, mu = 1.0;
  switch (level) {
    case MotionLevel::None: sigma = 0.0; psi = 1.0; mu = 1.0; break;
    case MotionLevel::Light: sigma = 0.5; psi = 1.0; mu = 1.0; break;
    case MotionLevel::Medium: sigma = 0.7; psi = 1.0; mu = 0.5; break;
    case MotionLevel::Heavy: sigma = 1.2; psi = 0.75; mu = 0.5; break;
  }
  std::array<OUParams, 3> out;
  const double setpoints[3] = {0.4, 0.0, 0.0};  // pitch holds tilted back
  for (int i = 0; i < 3; ++i) out[i] = OUParams{sigma, psi, mu, setpoints[i]};
  return out;
}

std::array<OUParams, 3> motion_preset(const std::string& name) {
  return motion_preset(parse_motion(name));
}

NeckState track_head(const NeckState& state, double k, double dt) {
  if (!(k > 0.0)) throw std::invalid_argument("track_head: gain must be positive");
  NeckState out = state;
  for (int i = 0; i < 3; ++i) {
    const double rate = k * (state.targets[i] - state.angles[i]);
    out.angles[i] = state.angles[i] + dt * rate;
    out.velocities[i] = rate;
    if (out.angles[i] > NeckState::kAngleLimit) {
      out.angles[i] = NeckState::kAngleLimit;
      out.velocities[i] = 0.0;
    } else if (out.angles[i] < -NeckState::kAngleLimit) {
      out.angles[i] = -NeckState::kAngleLimit;
      out.velocities[i] = 0.0;
    }
  }
  return out;
}

void advance_targets(NeckState& state, const std::array<OUParams, 3>& params, double dt,
                     RngStream& rng) {
  for (int i = 0; i < 3; ++i) {
    auto [th, v] = ou_step(state.targets[i], state.target_velocities[i], params[i], dt, rng);
    // targets obey the same physiological clamp as the tracked angles
    if (th > NeckState::kAngleLimit) {
      th = NeckState::kAngleLimit;
      v = 0.0;
    } else if (th < -NeckState::kAngleLimit) {
      th = -NeckState::kAngleLimit;
      v = 0.0;
    }
    state.targets[i] = th;
    state.target_velocities[i] = v;
  }
}

}  // namespace swabsim
