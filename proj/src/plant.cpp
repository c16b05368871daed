#include "swabsim/plant.hpp"

#include <algorithm>
#include <cmath>

namespace swabsim {

Pose6 neck_fk(double alpha, double beta, double gamma) {
  const Quat r = Quat(Eigen::AngleAxisd(alpha, Vec3::UnitY())) *
                 Quat(Eigen::AngleAxisd(beta, Vec3::UnitZ())) *
                 Quat(Eigen::AngleAxisd(gamma, Vec3::UnitX()));
  const Vec3 joint(0.0, 0.0, -kNeckLinkLength);
  const Vec3 link(0.0, 0.0, kNeckLinkLength);
  return {joint + r * link, r.normalized()};
}

std::array<Vec3, 5> fiducials_world(const HeadFixture& fixture, const Pose6& head_pose) {
  std::array<Vec3, 5> out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = head_pose.transform(fixture.fiducials[i]);
  return out;
}

ContactResult contact_forces(const NasalCorridor& corridor, const Pose6& nostril_pose,
                             const Pose6& head_pose, const Pose6& swab_grasp_pose,
                             const SwabBeam& swab, const AxialContactModel& axial,
                             const Twist6& ee_twist) {
  ContactResult out;

  const Vec3 shaft_w = swab_grasp_pose.orientation * Vec3::UnitZ();
  const Vec3 tip_w = swab_grasp_pose.position + swab.L_max * shaft_w;

  // world -> nostril frame
  const Pose6 nostril_world = head_pose.compose(nostril_pose);
  const Pose6 to_local = nostril_world.inverse();
  const Vec3 tip_l = to_local.transform(tip_w);

  const CorridorProjection proj = corridor.project(tip_l);
  out.tip_depth = std::clamp(proj.arclength, -0.05, corridor.arclength());
  // grip-to-contact distance is bounded by the corridor itself
  const double depth_in = std::clamp(proj.arclength, 0.0, corridor.arclength());
  out.contact_arclength =
      std::clamp(swab.contact_length(depth_in), swab.min_length(), swab.L_max);

  if (proj.arclength <= 0.0) return out;  // tip in front of the nostril: free space

  Vec3 force_l = Vec3::Zero();

  // channel wall: elastic transverse load at the tip. Deep excursions into
  // the surrounding tissue saturate instead of following the beam spring;
  // the cap sits above the overload threshold so safety still sees them.
  const double pen = proj.distance - proj.radius;
  double transverse_mag = 0.0;
  if (pen > 0.0 && proj.distance > 1e-12) {
    const double nu = stiffness_unchecked(swab, out.contact_arclength);
    transverse_mag = std::min(nu * pen, kTissueForceCap);
    const Vec3 outward = (tip_l - proj.closest) / proj.distance;
    force_l += transverse_mag * outward;
  }

  // nasopharynx wall: saturating spring plus Coulomb friction
  const double wall_pen = std::max(0.0, proj.arclength - corridor.np_depth());
  out.at_wall = wall_pen > 0.0;
  const Vec3 tip_vel_w = ee_twist.linear + ee_twist.angular.cross(tip_w - swab_grasp_pose.position);
  const Vec3 tangent_w = nostril_world.orientation * proj.tangent;
  const double v_axial = tip_vel_w.dot(tangent_w);
  const double f_axial = axial_force(axial, wall_pen, transverse_mag, v_axial);
  force_l += f_axial * proj.tangent;

  // report in the end-effector frame
  const Vec3 force_w = nostril_world.orientation * force_l;
  out.force_ee = swab_grasp_pose.orientation.conjugate() * force_w;
  return out;
}

}  // namespace swabsim
