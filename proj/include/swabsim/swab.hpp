#pragma once

#include <utility>
#include <vector>

namespace swabsim {

/// Elastic model of the swab shaft. Transverse stiffness follows an affine
/// cubic law in the grasp-to-load distance L:
///   nu(L) = 1 / (m_coef * L^3 + b_coef)   [N/m]
/// The law is singular at L = (-b_coef/m_coef)^(1/3); below that the model is
/// non-physical and queries are rejected.
struct SwabBeam {
  double L_max = 0.146;       // m, grasp point to tip
  double breakpoint = 0.080;  // m, shaft thickness change
  double m_coef = 43.89;      // cubic coefficient of 1/nu
  double b_coef = -0.0193;    // affine offset of 1/nu
  double zeta = 0.5;          // contact-travel scale for the dynamic schedule

  /// Smallest L accepted by stiffness(). A 0.1 mm guard above the cubic root
  /// keeps queries away from the singularity.
  double min_length() const;

  /// Contact length for a given tip displacement: L_max - zeta * displacement.
  double contact_length(double tip_displacement) const { return L_max - zeta * tip_displacement; }
};

/// Transverse stiffness nu(L) in N/m. Throws std::domain_error outside
/// (min_length, L_max].
double stiffness(const SwabBeam& beam, double L);

/// Same law without the domain guard; used where callers clamp first.
double stiffness_unchecked(const SwabBeam& beam, double L);

/// Linear elastic restoring force F = -nu * dx.
double restoring_force(double nu, double dx);

/// Least-squares fit of the affine cubic law from (L, nu) pairs.
/// Returns (m_coef, b_coef). Requires at least two distinct L values.
std::pair<double, double> fit_stiffness_law(const std::vector<std::pair<double, double>>& pairs);

/// Axial contact at the tip: a stiff wall that saturates once the shaft
/// buckles, plus Coulomb friction proportional to the transverse load.
struct AxialContactModel {
  double wall_stiffness = 1000.0;  // N/m
  double buckle_force = 1.0;       // N, saturation
  double friction_coef = 0.3;      // Coulomb mu
};

/// Axial force resisting insertion (positive = pushing back out).
/// penetration is depth beyond the wall; friction opposes tip_velocity_axial
/// (positive velocity = moving inward).
double axial_force(const AxialContactModel& model, double penetration, double transverse_normal,
                   double tip_velocity_axial);

}  // namespace swabsim
