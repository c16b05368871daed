#include "doctest.h"

#include "swabsim/optimize.hpp"
#include "swabsim/trajectory.hpp"

#include <cmath>
#include <stdexcept>

using namespace swabsim;

namespace {
const SwabBeam kBeam{};
}

TEST_CASE("part i ends at the expected tip offset") {
  const auto c = make_corridor(PhantomId::A, Side::Left);
  TrajParams p;
  p.chi = 0.0173;
  const WaypointTrack track = build_waypoints(p, c);
  const Pose6 end_i = target_at(track, track.part_boundaries[0]);
  // chi * (cos 30, 0, sin 30) in the nostril frame
  CHECK(end_i.position.x() == doctest::Approx(0.0173 * std::cos(M_PI / 6)).epsilon(1e-9));
  CHECK(end_i.position.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(end_i.position.z() == doctest::Approx(0.0173 * std::sin(M_PI / 6)).epsilon(1e-9));
}

TEST_CASE("degenerate chi keeps the turn at the nostril") {
  const auto c = make_corridor(PhantomId::A, Side::Left);
  TrajParams p;
  p.chi = 0.0;
  const WaypointTrack track = build_waypoints(p, c);
  const Pose6 end_i = target_at(track, track.part_boundaries[0]);
  CHECK(end_i.position.norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("the published optimum is reproduced by construction") {
  // on the right side the passage drifts by -3.9 degrees of yaw; aiming at
  // the matching ellipse point turns the shaft by 25.6 degrees of pitch and
  // -3.9 degrees of yaw at the end of part ii
  const auto c = make_corridor(PhantomId::A, Side::Right);
  TrajParams p;
  p.chi = 0.0173;
  // target point picked on the ray from the turn point with the published
  // final angles: pitch 30 - 25.6 = 4.4 degrees, yaw -3.9 degrees
  const double pitch = (30.0 - 25.6) * M_PI / 180.0;
  const double yaw = -3.9 * M_PI / 180.0;
  const Vec3 dir(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
                 std::sin(pitch));
  const Vec3 turn = p.chi * c.entry_direction();
  // intersect with the nasopharynx plane to recover (e1, e2)
  const Vec3 np_centre = c.point_at(c.np_depth());
  const Vec3 n = c.wall_normal();
  const double t = (np_centre - turn).dot(n) / dir.dot(n);
  const Vec3 target = turn + t * dir;
  Vec3 u2 = (Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n).normalized();
  Vec3 u1 = u2.cross(n).normalized();
  p.e1 = (target - np_centre).dot(u1);
  p.e2 = (target - np_centre).dot(u2);
  REQUIRE(p.feasible());

  const WaypointTrack track = build_waypoints(p, c);
  const Pose6 before = target_at(track, track.part_boundaries[0]);
  const Pose6 after = target_at(track, track.part_boundaries[1]);
  const Vec3 d_before = before.orientation * Vec3::UnitZ();
  const Vec3 d_after = after.orientation * Vec3::UnitZ();

  const double pitch_before = std::asin(d_before.z());
  const double pitch_after = std::asin(d_after.z());
  const double yaw_after = std::atan2(d_after.y(), d_after.x());
  CHECK((pitch_before - pitch_after) * 180.0 / M_PI == doctest::Approx(25.6).epsilon(0.01));
  CHECK(yaw_after * 180.0 / M_PI == doctest::Approx(-3.9).epsilon(0.01));
}

TEST_CASE("ellipse targets behind the turn point are rejected") {
  const auto c = make_corridor(PhantomId::A, Side::Left);
  TrajParams p;
  p.chi = 0.05;  // outside the box
  CHECK_THROWS_AS(build_waypoints(p, c), std::invalid_argument);
}

TEST_CASE("track timing, continuity and interpolation") {
  const auto c = make_corridor(PhantomId::A, Side::Left);
  const WaypointTrack track = build_waypoints(TrajParams{}, c);

  CHECK(track.total_duration == doctest::Approx(20.0));
  CHECK(track.part_boundaries[2] == doctest::Approx(20.0));

  // strictly increasing timestamps, gaps under 2 mm
  for (std::size_t i = 1; i < track.times.size(); ++i) {
    CHECK(track.times[i] > track.times[i - 1]);
    CHECK((track.poses[i].position - track.poses[i - 1].position).norm() < 0.002);
  }

  // endpoint and stored-waypoint interpolation is exact
  CHECK((target_at(track, 0.0).position - track.poses.front().position).norm() == 0.0);
  const std::size_t mid = track.times.size() / 2;
  const Pose6 at_mid = target_at(track, track.times[mid]);
  CHECK((at_mid.position - track.poses[mid].position).norm() < 1e-12);

  // translation-only midpoint is the arithmetic mean
  const std::size_t k = track.times.size() - 10;  // inside part iii
  const double tm = 0.5 * (track.times[k] + track.times[k + 1]);
  const Pose6 between = target_at(track, tm);
  const Vec3 mean = 0.5 * (track.poses[k].position + track.poses[k + 1].position);
  CHECK((between.position - mean).norm() < 1e-12);

  // clamped beyond the ends
  CHECK((target_at(track, 25.0).position - track.poses.back().position).norm() == 0.0);
}

TEST_CASE("cursor slowdown follows the sigmoid law") {
  TrackCursor c;
  // at the intercept the rate is exactly one half
  const TrackCursor c1 = advance_cursor(c, 0.5, 0.01, 20.0);
  CHECK(c1.l == doctest::Approx(0.005).epsilon(1e-12));
  // free running
  const TrackCursor c2 = advance_cursor(c, 0.0, 0.01, 20.0);
  CHECK(c2.l == doctest::Approx(0.01).epsilon(1e-10));
  // pinned by force
  const TrackCursor c3 = advance_cursor(c, 1.0, 0.01, 20.0);
  CHECK(c3.l < 1e-12);
  // the rate never leaves (0, 1]; away from double-precision saturation the
  // strict upper bound is visible too
  for (double f = -5.0; f <= 5.0; f += 0.25) {
    const double rate = (advance_cursor(c, f, 1.0, 20.0).l);
    CHECK(rate > 0.0);
    CHECK(rate <= 1.0);
    if (f >= 0.0) CHECK(rate < 1.0);
  }
  // monotone, clamped at the duration
  TrackCursor cc;
  double prev = 0.0;
  for (int i = 0; i < 2500; ++i) {
    cc = advance_cursor(cc, 0.2, 0.01, 20.0);
    CHECK(cc.l >= prev);
    prev = cc.l;
  }
  CHECK(cc.l <= 20.0);
}

TEST_CASE("strain energy: clean path, pinned single contact, phantom ordering") {
  const auto ca = make_corridor(PhantomId::A, Side::Left);
  const auto cb = make_corridor(PhantomId::B, Side::Left);

  // the default trajectory threads phantom A without contact
  CHECK(strain_energy(TrajParams{}, ca, kBeam) == doctest::Approx(0.0).epsilon(1e-15));

  // the narrower passage can only be worse, for any parameters
  for (double e2 = -0.004; e2 <= 0.004; e2 += 0.002) {
    TrajParams p;
    p.e2 = e2;
    const double ea = strain_energy(p, ca, kBeam);
    const double eb = strain_energy(p, cb, kBeam);
    CHECK(eb >= ea - 1e-15);
  }
}

TEST_CASE("a single millimetre of penetration contributes half nu d squared") {
  CHECK(strain_energy_term(10.5, 0.001) == doctest::Approx(5.25e-6).epsilon(1e-12));
}

TEST_CASE("simplex search recovers the minimum of a convex synthetic objective") {
  const Eigen::Vector3d target(0.012, 0.004, -0.002);
  Eigen::Matrix3d q;
  q << 4.0, 0.5, 0.0, 0.5, 2.0, 0.2, 0.0, 0.2, 1.0;
  auto f = [&](const Eigen::VectorXd& x) {
    const Eigen::Vector3d d = x - target;
    return d.dot(q * d);
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);
  NelderMeadOptions opts;
  opts.max_evals = 5000;
  const auto res = nelder_mead(f, x0, opts);
  CHECK((res.x - target).norm() < 1e-4);
}

TEST_CASE("trajectory optimisation never worsens the oracle and respects bounds") {
  const auto c = make_corridor(PhantomId::A, Side::Left);

  // a zero-energy start is already optimal
  const TrajParams clean{0.0173, 0.0, 0.0042};
  REQUIRE(strain_energy(clean, c, kBeam) == 0.0);
  const TrajParams kept = optimize_trajectory(clean, c, kBeam);
  CHECK(strain_energy(kept, c, kBeam) == 0.0);

  // from a poor start the optimum enters the published neighbourhood
  TrajParams rough{0.002, 0.004, -0.004};
  const double e0 = strain_energy(rough, c, kBeam);
  const TrajParams opt = optimize_trajectory(rough, c, kBeam);
  const double e1 = strain_energy(opt, c, kBeam);
  CHECK(e1 <= e0);
  CHECK(opt.chi >= 0.0);
  CHECK(opt.chi <= TrajParams::kChiMax);
  CHECK(opt.feasible());
  // upward entry then inward drive: qualitative shape of the optimum
  CHECK(opt.chi == doctest::Approx(0.0175).epsilon(0.75));  // within [5, 30] mm
  CHECK(opt.chi >= 0.005);
  CHECK(opt.chi <= 0.030);
}
