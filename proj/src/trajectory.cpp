#include "swabsim/trajectory.hpp"

#include "swabsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swabsim {

double TrajParams::constraint_violation() const {
  double v = 0.0;
  if (chi < 0.0) v += -chi;
  if (chi > kChiMax) v += chi - kChiMax;
  const double r2 = (e1 / kSemiAxis1) * (e1 / kSemiAxis1) + (e2 / kSemiAxis2) * (e2 / kSemiAxis2);
  if (r2 > 1.0) v += std::sqrt(r2) - 1.0;
  return v;
}

Quat direction_to_quat(const Vec3& dir) {
  const Vec3 z = dir.normalized();
  Vec3 x = Vec3::UnitZ().cross(z);
  const double n = x.norm();
  if (n < 1e-9) {
    // shaft pointing straight up/down; fall back to world x
    x = Vec3::UnitX();
  } else {
    x /= n;
  }
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Quat(r).normalized();
}

namespace {

// triangular velocity ramp: fraction of path covered at time fraction u
double ramp(double u) {
  u = std::clamp(u, 0.0, 1.0);
  if (u <= 0.5) return 2.0 * u * u;
  const double w = 1.0 - u;
  return 1.0 - 2.0 * w * w;
}

// in-plane basis of the nasopharynx ellipse: n is the wall normal, u1 is
// horizontal, u2 completes upward
void ellipse_basis(const Vec3& n, Vec3& u1, Vec3& u2) {
  u2 = Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n;
  if (u2.norm() < 1e-9) u2 = Vec3::UnitX();
  u2.normalize();
  u1 = u2.cross(n).normalized();
}

}  // namespace

WaypointTrack build_waypoints(const TrajParams& p, const NasalCorridor& corridor,
                              int waypoints_per_part) {
  if (p.constraint_violation() > 0.0)
    throw std::invalid_argument("build_waypoints: parameters outside bounds");
  if (waypoints_per_part < 2) throw std::invalid_argument("build_waypoints: need >= 2 waypoints per part");

  const Vec3 d0 = corridor.entry_direction();
  const Vec3 np_centre = corridor.point_at(corridor.np_depth());
  Vec3 u1, u2;
  ellipse_basis(corridor.wall_normal(), u1, u2);
  const Vec3 target = np_centre + p.e1 * u1 + p.e2 * u2;

  const Vec3 turn_point = p.chi * d0;
  const Vec3 to_target = target - turn_point;
  if (to_target.x() <= 0.0)
    throw std::invalid_argument("build_waypoints: ellipse target behind the turn point");
  const Vec3 d1 = to_target.normalized();

  const Quat q0 = direction_to_quat(d0);
  const Quat q1 = direction_to_quat(d1);

  WaypointTrack track;
  track.total_duration = kPartDurations[0] + kPartDurations[1] + kPartDurations[2];
  track.part_boundaries = {kPartDurations[0], kPartDurations[0] + kPartDurations[1],
                           track.total_duration};

  double t0 = 0.0;
  const int k = waypoints_per_part;
  for (int part = 0; part < 3; ++part) {
    const double dur = kPartDurations[part];
    // skip the duplicate boundary sample except at the very start
    const int j0 = (part == 0) ? 0 : 1;
    for (int j = j0; j <= k; ++j) {
      const double u = static_cast<double>(j) / k;
      const double s = ramp(u);
      Pose6 pose;
      switch (part) {
        case 0:
          pose = {turn_point * s, q0};
          break;
        case 1:
          pose = {turn_point, q0.slerp(s, q1).normalized()};
          break;
        default:
          pose = {turn_point + s * kPartIiiLength * d1, q1};
          break;
      }
      track.times.push_back(t0 + u * dur);
      track.poses.push_back(pose);
    }
    t0 += dur;
  }
  return track;
}

TrackCursor advance_cursor(const TrackCursor& c, double f_z, double dt, double duration) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance_cursor: dt must be positive");
  const double rate = logistic_complement(kSlowdownScale * (f_z - kSlowdownIntercept));
  TrackCursor out;
  out.l = std::min(c.l + dt * rate, duration);
  out.finished = out.l >= duration;
  return out;
}

Pose6 target_at(const WaypointTrack& track, double l) {
  const auto& ts = track.times;
  if (l <= ts.front()) return track.poses.front();
  if (l >= ts.back()) return track.poses.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), l);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin());
  const double span = ts[i] - ts[i - 1];
  const double w = span > 0.0 ? (l - ts[i - 1]) / span : 1.0;
  const Pose6& a = track.poses[i - 1];
  const Pose6& b = track.poses[i];
  return {a.position * (1.0 - w) + b.position * w, a.orientation.slerp(w, b.orientation).normalized()};
}

double strain_energy(const TrajParams& p, const NasalCorridor& corridor, const SwabBeam& swab,
                     int trajectory_samples, int shaft_segments) {
  const WaypointTrack track = build_waypoints(p, corridor);
  double energy = 0.0;
  for (int i = 0; i < trajectory_samples; ++i) {
    const double l = track.total_duration * static_cast<double>(i) / (trajectory_samples - 1);
    const Pose6 pose = target_at(track, l);
    const Vec3 tip = pose.position;
    const CorridorProjection tip_proj = corridor.project(tip);
    if (tip_proj.arclength >= corridor.np_depth()) break;  // reached the nasopharynx plane

    const double l_contact = std::clamp(swab.contact_length(std::max(0.0, tip_proj.arclength)),
                                        swab.min_length(), swab.L_max);
    const double nu = stiffness_unchecked(swab, l_contact);
    const Vec3 shaft = pose.orientation * Vec3::UnitZ();
    for (int j = 0; j < shaft_segments; ++j) {
      const Vec3 pt = tip - (swab.L_max * j / shaft_segments) * shaft;
      const CorridorProjection proj = corridor.project(pt);
      if (proj.arclength <= 0.0) continue;  // behind the nostril plane
      const double pen = proj.distance - proj.radius;
      if (pen > 0.0) energy += strain_energy_term(nu, pen);
    }
  }
  return energy;
}

TrajParams optimize_trajectory(const TrajParams& initial, const NasalCorridor& corridor,
                               const SwabBeam& swab) {
  if (!initial.feasible()) throw std::invalid_argument("optimize_trajectory: infeasible start");

  auto objective = [&](const Eigen::VectorXd& x) -> double {
    TrajParams p{x[0], x[1], x[2]};
    const double viol = p.constraint_violation();
    if (viol > 0.0) {
      // keep the search inside bounds; clamp so the oracle stays evaluable
      TrajParams q = p;
      q.chi = std::clamp(q.chi, 0.0, TrajParams::kChiMax);
      const double r = std::sqrt((q.e1 / TrajParams::kSemiAxis1) * (q.e1 / TrajParams::kSemiAxis1) +
                                 (q.e2 / TrajParams::kSemiAxis2) * (q.e2 / TrajParams::kSemiAxis2));
      if (r > 1.0) {
        q.e1 /= r;
        q.e2 /= r;
      }
      double base;
      try {
        base = strain_energy(q, corridor, swab);
      } catch (const std::invalid_argument&) {
        return 1e9;
      }
      return base + 1e6 * viol * viol + 1.0;
    }
    double e;
    try {
      e = strain_energy(p, corridor, swab);
    } catch (const std::invalid_argument&) {
      return 1e9;
    }
    if (!std::isfinite(e)) throw SimulationFault("optimize_trajectory: non-finite strain energy");
    return e;
  };

  Eigen::VectorXd x0(3);
  x0 << initial.chi, initial.e1, initial.e2;
  NelderMeadOptions opts;
  opts.initial_step = 0.003;
  opts.max_evals = 600;
  const NelderMeadResult res = nelder_mead(objective, x0, opts);
  TrajParams out{res.x[0], res.x[1], res.x[2]};
  if (!out.feasible()) return initial;  // penalty should prevent this
  return out;
}

}  // namespace swabsim
