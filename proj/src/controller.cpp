#include "swabsim/controller.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace swabsim {

ControllerConfig controller_preset(const std::string& name) {
  std::string l = name;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::toupper(c); });
  ControllerConfig cfg;
  cfg.name = l;
  if (l.size() != 4 || (l[0] != 'S' && l[0] != 'D'))
    throw std::invalid_argument("unknown controller preset '" + name + "'");
  cfg.kind = (l[0] == 'S') ? GainKind::Static : GainKind::Dynamic;
  const std::string mult = l.substr(1);
  if (mult == "1.0")
    cfg.multiplier = 1.0;
  else if (mult == "1.5")
    cfg.multiplier = 1.5;
  else if (mult == "2.0")
    cfg.multiplier = 2.0;
  else
    throw std::invalid_argument("unknown controller preset '" + name + "'");
  return cfg;
}

const std::array<std::string, 6>& controller_names_by_np_gain() {
  // ascending transverse gain at the nasopharynx: the dynamic schedules have
  // tapered to the local critical gain there, the static ones have not
  static const std::array<std::string, 6> order = {"D1.0", "D1.5", "D2.0",
                                                   "S1.0", "S1.5", "S2.0"};
  return order;
}

FilteredForce filter_step(const FilteredForce& ff, const Vec3& raw_force, double alpha, double dt) {
  if (!(dt > 0.0) || !(alpha > 0.0) || dt * alpha >= 1.0)
    throw std::invalid_argument("filter_step: require dt > 0, alpha > 0, dt*alpha < 1");
  return {ff.f + dt * alpha * (raw_force - ff.f)};
}

double critical_gain(double k, double alpha, double nu) {
  if (!(k > 0.0) || !(alpha > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("critical_gain: k, alpha, nu must be positive");
  return ((alpha + k) * (alpha + k) / 4.0 - k * alpha) / (nu * alpha);
}

double transverse_gain(const ControllerConfig& cfg, const SwabBeam& swab, double tip_displacement) {
  if (tip_displacement < 0.0)
    throw std::invalid_argument("transverse_gain: displacement must be >= 0");
  const double k = cfg.k_gain[0];
  double nu;
  if (cfg.kind == GainKind::Static) {
    nu = cfg.nu_tip;
  } else {
    const double l = std::clamp(swab.contact_length(tip_displacement), swab.min_length(), swab.L_max);
    nu = stiffness_unchecked(swab, l);
  }
  return cfg.multiplier * critical_gain(k, cfg.alpha, nu);
}

Eigen::Matrix<double, 6, 3> force_projection() {
  Eigen::Matrix<double, 6, 3> w;
  w << 1, 0, 0,
       0, 1, 0,
       0, 0, -1,
       0, 1, 0,
      -1, 0, 0,
       0, 0, 0;
  return w;
}

Twist6 control_step(const Pose6& target, const Pose6& current, const FilteredForce& ff,
                    const Vec3& target_force, double lambda_transverse, double lambda_axial,
                    const Eigen::Matrix<double, 6, 1>& k_gain) {
  if (!target.valid() || !current.valid() || !ff.f.allFinite() || !target_force.allFinite())
    throw std::invalid_argument("control_step: non-finite input");

  Twist6 cmd;
  cmd.linear = k_gain.head<3>().cwiseProduct(target.position - current.position);
  cmd.angular = k_gain.tail<3>().cwiseProduct(orientation_error(target.orientation, current.orientation));

  // force error in the end-effector frame
  const Vec3 df = ff.f - target_force;
  const Vec3 lam(lambda_transverse, lambda_transverse, lambda_axial);
  const Vec3 v_ee = -lam.cwiseProduct(df);
  const Vec3 w_ee(lambda_transverse * df.y(), -lambda_transverse * df.x(), 0.0);

  cmd.linear += current.orientation * v_ee;
  cmd.angular += current.orientation * w_ee;
  return cmd;
}

Eigen::Matrix2d closed_loop_matrix(double k, double alpha, double nu, double lambda) {
  Eigen::Matrix2d a;
  a << -k, -lambda, alpha * nu, -alpha;
  return a;
}

double step_response_overshoot(double k, double alpha, double nu, double lambda, double dt,
                               double t_end) {
  // unit displacement step into the wall with an empty force filter
  double x = 1.0, f = 0.0;
  double f_max = 0.0, f_min = 0.0;
  const int steps = static_cast<int>(t_end / dt);
  for (int i = 0; i < steps; ++i) {
    const double xdot = -k * x - lambda * f;
    const double fdot = alpha * (nu * x - f);
    x += dt * xdot;
    f += dt * fdot;
    f_max = std::max(f_max, f);
    f_min = std::min(f_min, f);
  }
  if (f_max <= 0.0) return 0.0;
  return -f_min / f_max;
}

}  // namespace swabsim
