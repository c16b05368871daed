#include "swabsim/swab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace swabsim {

namespace {
constexpr double kDomainGuard = 1e-4;  // m, keeps nu finite near the cubic root
}

double SwabBeam::min_length() const {
  return std::cbrt(-b_coef / m_coef) + kDomainGuard;
}

double stiffness_unchecked(const SwabBeam& beam, double L) {
  return 1.0 / (beam.m_coef * L * L * L + beam.b_coef);
}

double stiffness(const SwabBeam& beam, double L) {
  if (L < beam.min_length() || L > beam.L_max) {
    throw std::domain_error("stiffness: L=" + std::to_string(L) +
                            " outside valid domain [" + std::to_string(beam.min_length()) + ", " +
                            std::to_string(beam.L_max) + "]");
  }
  return stiffness_unchecked(beam, L);
}

double restoring_force(double nu, double dx) { return -nu * dx; }

std::pair<double, double> fit_stiffness_law(const std::vector<std::pair<double, double>>& pairs) {
  std::set<double> distinct;
  for (const auto& [L, nu] : pairs) {
    if (!(nu > 0.0)) throw std::invalid_argument("fit_stiffness_law: nu must be positive");
    distinct.insert(L);
  }
  if (distinct.size() < 2)
    throw std::invalid_argument("fit_stiffness_law: need at least two distinct L values");

  // ordinary least squares of y = 1/nu against x = L^3
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pairs.size());
  for (const auto& [L, nu] : pairs) {
    const double x = L * L * L;
    const double y = 1.0 / nu;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  const double m = (n * sxy - sx * sy) / denom;
  const double b = (sy - m * sx) / n;
  return {m, b};
}

double axial_force(const AxialContactModel& model, double penetration, double transverse_normal,
                   double tip_velocity_axial) {
  if (penetration < 0.0) throw std::invalid_argument("axial_force: penetration must be >= 0");
  const double wall = std::min(model.wall_stiffness * penetration, model.buckle_force);
  double friction = 0.0;
  if (tip_velocity_axial > 0.0)
    friction = model.friction_coef * std::abs(transverse_normal);
  else if (tip_velocity_axial < 0.0)
    friction = -model.friction_coef * std::abs(transverse_normal);
  return wall + friction;
}

}  // namespace swabsim
