#pragma once

#include "swabsim/corridor.hpp"
#include "swabsim/swab.hpp"
#include "swabsim/types.hpp"

#include <array>

namespace swabsim {

/// Distance from the spherical neck joint up to the head centre.
inline constexpr double kNeckLinkLength = 0.1214;  // m

/// Transverse contact saturation: tissue yields and the shaft slips long
/// before the linear spring would reach this level. Kept above the overload
/// abort threshold.
inline constexpr double kTissueForceCap = 4.0;  // N

/// Head pose from the virtual neck angles. The neck is a spherical joint
/// kNeckLinkLength below the nominal head centre; rotation order is intrinsic
/// pitch (about y), yaw (about z), roll (about x).
Pose6 neck_fk(double alpha, double beta, double gamma);

inline Pose6 neck_fk(const Vec3& angles) { return neck_fk(angles.x(), angles.y(), angles.z()); }

/// Fixture fiducials under a head pose.
std::array<Vec3, 5> fiducials_world(const HeadFixture& fixture, const Pose6& head_pose);

/// Plant output for one step.
///
/// force_ee is the force the swab applies to its surroundings, expressed in
/// the end-effector frame (x, y transverse; z axial, positive when the swab
/// presses forward along its shaft). This is the loadcell convention the
/// controllers consume: pressing into a wall by dx reads +nu*dx on that axis.
struct ContactResult {
  Vec3 force_ee{Vec3::Zero()};
  double contact_arclength = 0.0;  // grasp-to-contact distance used for nu
  double tip_depth = 0.0;          // arclength of the tip along the corridor
  bool at_wall = false;            // nasopharynx wall touched
};

/// Quasi-static contact between the (straight) swab and the corridor.
/// The tip is the dominant contact: penetration beyond the channel radius
/// produces an elastic transverse force with the stiffness evaluated at
/// L_max - zeta * tip_depth; depth beyond the nasopharynx wall produces the
/// saturating axial wall force plus Coulomb friction from the transverse load.
ContactResult contact_forces(const NasalCorridor& corridor, const Pose6& nostril_pose,
                             const Pose6& head_pose, const Pose6& swab_grasp_pose,
                             const SwabBeam& swab, const AxialContactModel& axial,
                             const Twist6& ee_twist);

}  // namespace swabsim
