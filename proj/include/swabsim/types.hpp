#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace swabsim {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using Mat3 = Eigen::Matrix3d;

/// Thrown when the world integrator detects a non-finite state. Carries a
/// diagnostic dump of the offending quantities.
class SimulationFault : public std::runtime_error {
 public:
  explicit SimulationFault(const std::string& what) : std::runtime_error(what) {}
};

/// Rigid pose: position in meters plus a unit quaternion.
struct Pose6 {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};

  static Pose6 identity() { return {}; }

  bool valid(double quat_tol = 1e-9) const {
    return position.allFinite() && orientation.coeffs().allFinite() &&
           std::abs(orientation.norm() - 1.0) <= quat_tol;
  }

  void renormalize() { orientation.normalize(); }

  /// Composition: this * other (other expressed in this frame).
  Pose6 compose(const Pose6& other) const {
    return {position + orientation * other.position, (orientation * other.orientation).normalized()};
  }

  Pose6 inverse() const {
    Quat qi = orientation.conjugate();
    return {qi * (-position), qi};
  }

  Vec3 transform(const Vec3& p) const { return position + orientation * p; }
};

/// Spatial velocity, world-frame unless stated otherwise.
struct Twist6 {
  Vec3 linear{Vec3::Zero()};
  Vec3 angular{Vec3::Zero()};

  bool finite() const { return linear.allFinite() && angular.allFinite(); }

  Twist6 operator+(const Twist6& o) const { return {linear + o.linear, angular + o.angular}; }
};

/// One loadcell reading. Components are the force the swab applies to the
/// environment, expressed in the end-effector frame: x,y transverse, z axial
/// (positive when pressing forward along the shaft).
struct ForceSample {
  Vec3 f{Vec3::Zero()};
  double t{0.0};

  static constexpr double kSensorRange = 50.0;  // N, sanity bound

  bool sane() const { return f.allFinite() && f.norm() < kSensorRange; }
};

/// Integrate a world-frame twist over dt.
inline Pose6 integrate_twist(const Pose6& pose, const Twist6& tw, double dt) {
  Pose6 out = pose;
  out.position += tw.linear * dt;
  const double wn = tw.angular.norm();
  if (wn > 0.0) {
    out.orientation = Quat(Eigen::AngleAxisd(wn * dt, tw.angular / wn)) * out.orientation;
    out.orientation.normalize();
  }
  return out;
}

/// Axis-angle difference taking `from` to `to`, expressed in the world frame.
/// The quaternion sign is canonicalised so the angle is always in [0, pi].
inline Vec3 orientation_error(const Quat& to, const Quat& from) {
  Quat d = to * from.conjugate();
  if (d.w() < 0.0) d.coeffs() *= -1.0;
  Eigen::AngleAxisd aa(d);
  return aa.angle() * aa.axis();
}

enum class StageId { Sentry, Approach, Insert, Collect, Extract, Aborted, Done };

const char* stage_name(StageId s);

/// Forward-only stage order, with Aborted reachable from Approach, Insert and
/// Collect and always followed by Extract.
bool stage_transition_legal(StageId from, StageId to);

struct SimConfig {
  double control_rate = 100.0;  // Hz
  double vision_rate = 25.0;    // Hz; control_rate must divide into it evenly
  std::uint64_t seed = 12345;
  double duration_limit = 240.0;  // s

  double dt() const { return 1.0 / control_rate; }

  /// control steps per vision frame
  int vision_divisor() const { return static_cast<int>(std::lround(control_rate / vision_rate)); }

  void validate() const {
    if (!(vision_rate > 0.0) || control_rate < vision_rate)
      throw std::invalid_argument("SimConfig: need control_rate >= vision_rate > 0");
    const double ratio = control_rate / vision_rate;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9)
      throw std::invalid_argument("SimConfig: control_rate must be an integer multiple of vision_rate");
    if (!(duration_limit > 0.0)) throw std::invalid_argument("SimConfig: duration_limit must be positive");
  }
};

}  // namespace swabsim
