#pragma once

#include "swabsim/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace swabsim {

enum class PhantomId { A, B };
enum class Side { Left, Right };

const char* phantom_name(PhantomId p);
const char* side_name(Side s);
PhantomId parse_phantom(const std::string& s);
Side parse_side(const std::string& s);

/// Closest-point query against the corridor centerline.
struct CorridorProjection {
  double arclength = 0.0;   // along the centerline; negative before the nostril
  double distance = 0.0;    // radial distance from the centerline
  Vec3 closest{Vec3::Zero()};
  Vec3 tangent{Vec3::Zero()};
  double radius = 0.0;      // channel radius at the projected point
};

/// Nasal passage model: a piecewise-linear centerline from nostril to a point
/// behind the nasopharynx wall, with a per-vertex channel radius. Points are
/// stored in the nostril frame (x into the cavity, z up, origin at the
/// nostril centre); the head fixture's nostril pose places them in the head
/// frame.
class NasalCorridor {
 public:
  NasalCorridor(std::vector<Vec3> centerline, std::vector<double> radii, double np_depth,
                PhantomId id, Side side);

  /// Closest point on (the infinite extension of) the centerline. Before the
  /// first vertex the arclength is negative; past the last vertex it keeps
  /// growing along the final tangent.
  CorridorProjection project(const Vec3& point_head) const;

  double radius_at(double arclength) const;

  double arclength() const { return cum_.back(); }
  double np_depth() const { return np_depth_; }
  PhantomId phantom() const { return id_; }
  Side side() const { return side_; }
  const std::vector<Vec3>& centerline() const { return points_; }
  const std::vector<double>& radii() const { return radii_; }

  /// Entry direction (unit tangent of the first segment).
  Vec3 entry_direction() const { return tangents_.front(); }
  /// Tangent of the final segment; the nasopharynx wall is normal to it.
  Vec3 wall_normal() const { return tangents_.back(); }
  /// Centerline point at given arclength (clamped to the ends).
  Vec3 point_at(double arclength) const;

  static NasalCorridor load_json(const std::string& path);
  void save_json(const std::string& path) const;

 private:
  std::vector<Vec3> points_;
  std::vector<double> radii_;
  std::vector<Vec3> tangents_;  // per segment
  std::vector<double> cum_;     // cumulative arclength per vertex
  double np_depth_;
  PhantomId id_;
  Side side_;
};

/// Built-in corridor geometry. Both phantoms share a centerline per side;
/// Phantom B narrows the passage past the vestibule.
NasalCorridor make_corridor(PhantomId id, Side side);

/// Head-mounted fixture: fiducial markers for the vision pipeline and the
/// rigidly attached nostril frames (x points into the cavity, z up).
struct HeadFixture {
  std::array<Vec3, 5> fiducials;
  Pose6 nostril_pose_left;
  Pose6 nostril_pose_right;

  const Pose6& nostril_pose(Side s) const {
    return s == Side::Left ? nostril_pose_left : nostril_pose_right;
  }
};

HeadFixture make_head_fixture();

}  // namespace swabsim
