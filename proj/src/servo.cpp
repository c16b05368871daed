#include "swabsim/servo.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace swabsim {

std::vector<std::pair<int, Vec3>> measure_fiducials(const std::array<Vec3, 5>& true_points,
                                                    double noise_sigma, double dropout_prob,
                                                    RngStream& rng) {
  if (noise_sigma < 0.0) throw std::invalid_argument("measure_fiducials: noise_sigma must be >= 0");
  if (dropout_prob < 0.0 || dropout_prob >= 1.0)
    throw std::invalid_argument("measure_fiducials: dropout_prob must be in [0,1)");
  std::vector<std::pair<int, Vec3>> out;
  out.reserve(true_points.size());
  for (std::size_t i = 0; i < true_points.size(); ++i) {
    if (rng.bernoulli(dropout_prob)) continue;
    Vec3 p = true_points[i];
    if (noise_sigma > 0.0)
      p += Vec3(rng.normal(0.0, noise_sigma), rng.normal(0.0, noise_sigma),
                rng.normal(0.0, noise_sigma));
    out.emplace_back(static_cast<int>(i), p);
  }
  return out;
}

Pose6 register_pose(const std::vector<std::pair<int, Vec3>>& measured,
                    const std::array<Vec3, 5>& reference) {
  if (measured.size() < 3)
    throw EstimationUnavailable("register_pose: fewer than 3 fiducials measured");

  Vec3 ref_c = Vec3::Zero(), meas_c = Vec3::Zero();
  for (const auto& [idx, p] : measured) {
    if (idx < 0 || idx >= static_cast<int>(reference.size()))
      throw std::invalid_argument("register_pose: fiducial index out of range");
    ref_c += reference[static_cast<std::size_t>(idx)];
    meas_c += p;
  }
  const double n = static_cast<double>(measured.size());
  ref_c /= n;
  meas_c /= n;

  Mat3 h = Mat3::Zero();
  double spread = 0.0;
  for (const auto& [idx, p] : measured) {
    const Vec3 r = reference[static_cast<std::size_t>(idx)] - ref_c;
    const Vec3 m = p - meas_c;
    h += r * m.transpose();
    spread += r.squaredNorm();
  }

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // rank < 2 means the used reference markers are (near) collinear
  const double s0 = svd.singularValues()(0);
  if (s0 <= 0.0 || svd.singularValues()(1) < 1e-9 * std::max(s0, spread))
    throw EstimationUnavailable("register_pose: degenerate (collinear) correspondences");

  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();

  Pose6 out;
  out.orientation = Quat(r).normalized();
  out.position = meas_c - r * ref_c;
  return out;
}

PoseEstimate filter_pose(const PoseEstimate& prev, const std::optional<Pose6>& meas,
                         const Twist6& /*ee_motion*/, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("filter_pose: dt must be positive");
  PoseEstimate out = prev;
  if (meas.has_value()) {
    if (!prev.valid) {
      out.pose = *meas;  // first fix: adopt outright
    } else {
      out.pose.position =
          prev.pose.position + PoseEstimate::kBlend * (meas->position - prev.pose.position);
      out.pose.orientation =
          prev.pose.orientation.slerp(PoseEstimate::kBlend, meas->orientation).normalized();
    }
    out.age = 0.0;
    out.valid = true;
  } else {
    out.age = prev.age + dt;
    out.valid = prev.valid && out.age <= PoseEstimate::kMaxAge;
  }
  return out;
}

double adaptive_gain(double error_norm, const ServoGains& g) {
  if (error_norm < 0.0) throw std::invalid_argument("adaptive_gain: error_norm must be >= 0");
  const double span = g.lambda0 - g.lambda_inf;
  return span * std::exp(-(g.lambda0_slope / span) * error_norm) + g.lambda_inf;
}

std::pair<BandpassState, Vec3> bandpass_step(const BandpassState& state, const Vec3& force,
                                             double dt, const ServoGains& g) {
  if (!(dt > 0.0)) throw std::invalid_argument("bandpass_step: dt must be positive");
  BandpassState next;
  next.f1 = state.f1 + dt * g.alpha1 * (force - state.f1);
  next.f2 = state.f2 + dt * g.alpha2 * (force - state.f2);
  const Vec3 repel = g.lambda_vs.cwiseProduct(next.f1 - next.f2);
  return {next, repel};
}

Twist6 servo_step(const PoseEstimate& est, const Pose6& tip_pose, const Vec3& repel, double dt,
                  const ServoGains& g) {
  if (!(dt > 0.0)) throw std::invalid_argument("servo_step: dt must be positive");
  if (!est.valid) return {};  // hold position until the estimate recovers

  const Vec3 e_t = tip_pose.position - est.pose.position;
  const Vec3 e_w = orientation_error(tip_pose.orientation, est.pose.orientation);
  const double norm = std::sqrt(e_t.squaredNorm() + e_w.squaredNorm());
  const double lambda = adaptive_gain(norm, g);

  Twist6 cmd;
  cmd.linear = -lambda * e_t + repel;
  cmd.angular = -lambda * e_w;
  return cmd;
}

bool servo_converged(const PoseEstimate& est, const Pose6& tip_pose, const ServoGains& g) {
  if (!est.valid) return false;
  const double pos_err = (tip_pose.position - est.pose.position).norm();
  const double ang_err = orientation_error(tip_pose.orientation, est.pose.orientation).norm();
  return pos_err < g.converge_pos && ang_err < g.converge_angle;
}

}  // namespace swabsim
