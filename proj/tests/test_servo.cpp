#include "doctest.h"

#include "swabsim/servo.hpp"

#include <cmath>
#include <stdexcept>

using namespace swabsim;

TEST_CASE("fiducial measurement: exact, noisy and dropped markers") {
  const std::array<Vec3, 5> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1),
                                   Vec3(1, 1, 0)};

  SUBCASE("no noise, no dropout: everything comes back exactly") {
    RngStream rng(1, "vision");
    const auto out = measure_fiducials(pts, 0.0, 0.0, rng);
    REQUIRE(out.size() == 5);
    for (const auto& [idx, p] : out) CHECK((p - pts[static_cast<std::size_t>(idx)]).norm() == 0.0);
  }

  SUBCASE("heavy dropout leaves a binomial number of markers") {
    RngStream rng(2, "vision");
    const double keep = 0.1;
    long long total = 0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) total += static_cast<long long>(
        measure_fiducials(pts, 0.0, 1.0 - keep, rng).size());
    const double mean = static_cast<double>(total) / draws;
    CHECK(mean == doctest::Approx(5.0 * keep).epsilon(0.05));
  }

  SUBCASE("per-marker error magnitude has the chi-distribution RMS") {
    RngStream rng(3, "vision");
    const double sigma = 0.001;
    double sum2 = 0.0;
    long long n = 0;
    for (int i = 0; i < 10000; ++i) {
      for (const auto& [idx, p] : measure_fiducials(pts, sigma, 0.0, rng)) {
        sum2 += (p - pts[static_cast<std::size_t>(idx)]).squaredNorm();
        ++n;
      }
    }
    const double rms = std::sqrt(sum2 / static_cast<double>(n));
    CHECK(rms == doctest::Approx(sigma * std::sqrt(3.0)).epsilon(0.10));
  }
}

TEST_CASE("rigid registration recovers exact transforms") {
  const std::array<Vec3, 5> ref = {Vec3(0.09, 0.06, 0.02), Vec3(0.09, -0.06, 0.02),
                                   Vec3(0.085, 0.055, -0.075), Vec3(0.085, -0.055, -0.075),
                                   Vec3(0.10, 0.0, 0.08)};

  SUBCASE("identity") {
    std::vector<std::pair<int, Vec3>> meas;
    for (int i = 0; i < 5; ++i) meas.emplace_back(i, ref[static_cast<std::size_t>(i)]);
    const Pose6 pose = register_pose(meas, ref);
    CHECK(pose.position.norm() < 1e-12);
    CHECK(pose.orientation.angularDistance(Quat::Identity()) < 1e-12);
  }

  SUBCASE("exact rigid motion, exact recovery, equivariance") {
    const Quat r(Eigen::AngleAxisd(0.7, Vec3(0.2, -0.5, 0.8).normalized()));
    const Vec3 t(0.3, -0.1, 0.25);
    std::vector<std::pair<int, Vec3>> meas;
    for (int i = 0; i < 5; ++i) meas.emplace_back(i, r * ref[static_cast<std::size_t>(i)] + t);
    const Pose6 pose = register_pose(meas, ref);
    CHECK((pose.position - t).norm() < 1e-10);
    CHECK(pose.orientation.angularDistance(r) < 1e-10);
  }

  SUBCASE("three markers suffice, two do not") {
    std::vector<std::pair<int, Vec3>> three;
    for (int i = 0; i < 3; ++i) three.emplace_back(i, ref[static_cast<std::size_t>(i)]);
    CHECK_NOTHROW(register_pose(three, ref));
    std::vector<std::pair<int, Vec3>> two(three.begin(), three.begin() + 2);
    CHECK_THROWS_AS(register_pose(two, ref), EstimationUnavailable);
  }
}

TEST_CASE("pose filter blends, coasts and expires") {
  PoseEstimate est;  // starts invalid

  Pose6 meas;
  meas.position = Vec3(1.0, 0.0, 0.0);
  est = filter_pose(est, meas, Twist6{}, 0.01);
  CHECK(est.valid);
  CHECK((est.pose.position - meas.position).norm() < 1e-12);  // first fix adopted

  // identical measurement is a fixed point
  const PoseEstimate same = filter_pose(est, meas, Twist6{}, 0.01);
  CHECK((same.pose.position - est.pose.position).norm() < 1e-12);

  // constant measurement: geometric convergence at ratio 0.7 per frame
  Pose6 target;
  target.position = Vec3(2.0, 0.0, 0.0);
  PoseEstimate run = est;
  double err_prev = (run.pose.position - target.position).norm();
  for (int i = 0; i < 10; ++i) {
    run = filter_pose(run, target, Twist6{}, 1.0 / 25.0);
    const double err = (run.pose.position - target.position).norm();
    CHECK(err == doctest::Approx(0.7 * err_prev).epsilon(1e-9));
    err_prev = err;
  }

  // coasting ages out after one second
  PoseEstimate stale = est;
  for (int i = 0; i < 99; ++i) {
    stale = filter_pose(stale, std::nullopt, Twist6{}, 0.01);
    CHECK(stale.valid);
  }
  for (int i = 0; i < 25; ++i) stale = filter_pose(stale, std::nullopt, Twist6{}, 0.01);
  CHECK_FALSE(stale.valid);
}

TEST_CASE("adaptive gain hits its published endpoints and slope") {
  CHECK(adaptive_gain(0.0) == doctest::Approx(2.5));
  CHECK(adaptive_gain(100.0) == doctest::Approx(0.5).epsilon(1e-9));
  // central finite difference at zero
  const double h = 1e-6;
  const double slope = (adaptive_gain(h) - adaptive_gain(0.0)) / h;
  CHECK(slope == doctest::Approx(-30.0).epsilon(1e-3));
  // strictly decreasing, bounded in (lambda_inf, lambda0]
  double prev = adaptive_gain(0.0);
  for (double e = 0.01; e < 2.0; e += 0.01) {
    const double g = adaptive_gain(e);
    CHECK(g < prev);
    CHECK(g > 0.5);
    prev = g;
  }
}

TEST_CASE("band-pass force response spikes then vanishes") {
  const ServoGains g;
  BandpassState bp;
  const double dt = 0.001;

  // constant input from the start: the response peaks near the closed-form
  // time ln(a1/a2)/(a1-a2) and decays back toward zero
  double peak = 0.0, t_peak = 0.0;
  Vec3 last = Vec3::Zero();
  for (int i = 1; i <= 20000; ++i) {
    auto [next, repel] = bandpass_step(bp, Vec3(1.0, 0.0, 0.0), dt, g);
    bp = next;
    last = bp.f1 - bp.f2;
    if (last.x() > peak) {
      peak = last.x();
      t_peak = i * dt;
    }
  }
  CHECK(t_peak == doctest::Approx(std::log(g.alpha1 / g.alpha2) / (g.alpha1 - g.alpha2))
                      .epsilon(0.01));
  // closed form peak: (a2/a1)^(a2/(a1-a2)) - (a2/a1)^(a1/(a1-a2))
  const double ratio = g.alpha2 / g.alpha1;
  const double peak_expected = std::pow(ratio, g.alpha2 / (g.alpha1 - g.alpha2)) -
                               std::pow(ratio, g.alpha1 / (g.alpha1 - g.alpha2));
  CHECK(peak == doctest::Approx(peak_expected).epsilon(0.01));
  CHECK(std::abs(last.x()) < 1e-3);

  // zero input forever: zero response
  BandpassState z;
  for (int i = 0; i < 100; ++i) {
    auto [next, repel] = bandpass_step(z, Vec3::Zero(), dt, g);
    z = next;
    CHECK(repel.norm() == 0.0);
  }
}

TEST_CASE("servo command follows the adaptive-gain law") {
  PoseEstimate est;
  est.valid = true;

  SUBCASE("zero error, zero repel: zero twist") {
    const Twist6 cmd = servo_step(est, Pose6{}, Vec3::Zero(), 0.01);
    CHECK(cmd.linear.norm() == 0.0);
    CHECK(cmd.angular.norm() == 0.0);
  }

  SUBCASE("pure 10 mm x error drives -x at lambda(0.01) * 0.01") {
    Pose6 tip;
    tip.position = Vec3(0.01, 0.0, 0.0);
    const Twist6 cmd = servo_step(est, tip, Vec3::Zero(), 0.01);
    CHECK(cmd.linear.x() == doctest::Approx(-adaptive_gain(0.01) * 0.01).epsilon(1e-12));
    CHECK(cmd.linear.y() == 0.0);
    CHECK(cmd.angular.norm() == 0.0);
  }

  SUBCASE("invalid estimate holds position") {
    PoseEstimate bad;
    Pose6 tip;
    tip.position = Vec3(0.3, 0.0, 0.0);
    const Twist6 cmd = servo_step(bad, tip, Vec3(1, 1, 1), 0.01);
    CHECK(cmd.linear.norm() == 0.0);
    CHECK(cmd.angular.norm() == 0.0);
  }
}

TEST_CASE("servo converges from the workspace in under fifteen seconds") {
  // static target, no noise, no contact: integrate the tip directly
  PoseEstimate est;
  est.valid = true;
  est.pose.position = Vec3(0.0, 0.0, 0.0);

  Pose6 tip;
  tip.position = Vec3(0.08, -0.05, 0.06);
  tip.orientation = Quat(Eigen::AngleAxisd(0.4, Vec3(1, 1, 0).normalized()));

  const double dt = 0.01;
  double t = 0.0;
  while (t < 15.0 && !servo_converged(est, tip)) {
    const Twist6 cmd = servo_step(est, tip, Vec3::Zero(), dt);
    tip = integrate_twist(tip, cmd, dt);
    t += dt;
  }
  CHECK(servo_converged(est, tip));
  CHECK(t < 15.0);
}
