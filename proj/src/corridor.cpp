#include "swabsim/corridor.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace swabsim {

using nlohmann::json;

const char* phantom_name(PhantomId p) { return p == PhantomId::A ? "A" : "B"; }
const char* side_name(Side s) { return s == Side::Left ? "Left" : "Right"; }

namespace {
std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

PhantomId parse_phantom(const std::string& s) {
  const std::string l = lower(s);
  if (l == "a") return PhantomId::A;
  if (l == "b") return PhantomId::B;
  throw std::invalid_argument("unknown phantom '" + s + "' (expected A or B)");
}

Side parse_side(const std::string& s) {
  const std::string l = lower(s);
  if (l == "left" || l == "l") return Side::Left;
  if (l == "right" || l == "r") return Side::Right;
  throw std::invalid_argument("unknown side '" + s + "' (expected Left or Right)");
}

NasalCorridor::NasalCorridor(std::vector<Vec3> centerline, std::vector<double> radii,
                             double np_depth, PhantomId id, Side side)
    : points_(std::move(centerline)), radii_(std::move(radii)), np_depth_(np_depth), id_(id), side_(side) {
  if (points_.size() < 2) throw std::invalid_argument("corridor: need at least 2 centerline points");
  if (radii_.size() != points_.size())
    throw std::invalid_argument("corridor: one radius per centerline point required");
  for (double r : radii_)
    if (!(r > 0.0)) throw std::invalid_argument("corridor: radii must be positive");

  cum_.resize(points_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const Vec3 d = points_[i] - points_[i - 1];
    const double len = d.norm();
    if (!(len > 1e-9)) throw std::invalid_argument("corridor: degenerate centerline segment");
    tangents_.push_back(d / len);
    cum_[i] = cum_[i - 1] + len;
  }
  if (cum_.back() < np_depth_)
    throw std::invalid_argument("corridor: centerline arclength must reach np_depth");
}

CorridorProjection NasalCorridor::project(const Vec3& p) const {
  CorridorProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec3& a = points_[i];
    const Vec3& t = tangents_[i];
    const double seg_len = cum_[i + 1] - cum_[i];
    double u = (p - a).dot(t);
    // allow extension before the nostril and past the end
    if (i > 0) u = std::max(u, 0.0);
    if (i + 2 < points_.size()) u = std::min(u, seg_len);
    const Vec3 c = a + u * t;
    const double d2 = (p - c).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.arclength = cum_[i] + u;
      best.closest = c;
      best.tangent = t;
    }
  }
  best.distance = std::sqrt(best_d2);
  best.radius = radius_at(best.arclength);
  return best;
}

double NasalCorridor::radius_at(double s) const {
  if (s <= cum_.front()) return radii_.front();
  if (s >= cum_.back()) return radii_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
  const double span = cum_[i + 1] - cum_[i];
  const double w = (s - cum_[i]) / span;
  return radii_[i] * (1.0 - w) + radii_[i + 1] * w;
}

Vec3 NasalCorridor::point_at(double s) const {
  if (s <= 0.0) return points_.front();
  if (s >= cum_.back()) return points_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
  return points_[i] + (s - cum_[i]) * tangents_[i];
}

NasalCorridor NasalCorridor::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("corridor: cannot open " + path);
  json j;
  in >> j;
  std::vector<Vec3> pts;
  for (const auto& row : j.at("centerline")) {
    if (row.size() != 3) throw std::runtime_error("corridor: centerline rows must be [x,y,z]");
    pts.emplace_back(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
  }
  std::vector<double> radii = j.at("radii").get<std::vector<double>>();
  return NasalCorridor(std::move(pts), std::move(radii), j.at("np_depth").get<double>(),
                       parse_phantom(j.at("phantom").get<std::string>()),
                       parse_side(j.at("side").get<std::string>()));
}

void NasalCorridor::save_json(const std::string& path) const {
  json j;
  j["phantom"] = phantom_name(id_);
  j["side"] = side_name(side_);
  j["np_depth"] = np_depth_;
  j["radii"] = radii_;
  json pts = json::array();
  for (const auto& p : points_) pts.push_back({p.x(), p.y(), p.z()});
  j["centerline"] = pts;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("corridor: cannot write " + path);
  out << j.dump(2) << "\n";
}

namespace {

Vec3 direction(double pitch_rad, double yaw_rad) {
  return {std::cos(pitch_rad) * std::cos(yaw_rad), std::cos(pitch_rad) * std::sin(yaw_rad),
          std::sin(pitch_rad)};
}

constexpr double kDeg = M_PI / 180.0;

// Corridor construction, in the nostril frame (x into the cavity, z up):
// a 30 deg vestibule incline, a long central passage drifting toward the
// septum, and a shallow descent to the nasopharynx wall. The centerline
// continues 10 mm past the wall so projections stay well defined.
struct CorridorSpec {
  double entry_len = 0.0173;
  double entry_pitch = 30.0 * kDeg;
  double central_len = 0.050;
  double central_pitch = 4.4 * kDeg;
  double descent_pitch = -3.6 * kDeg;
  double yaw_mag = 3.9 * kDeg;
  double overshoot = 0.010;  // centerline continues past the wall
  double vestibule_radius = 0.009;
  double passage_radius_a = 0.0045;
  double passage_radius_b = 0.0030;
};

}  // namespace

NasalCorridor make_corridor(PhantomId id, Side side) {
  const CorridorSpec c;
  // Left passages drift toward +yaw in the local frame (toward the septum),
  // right passages mirror it.
  const double yaw = (side == Side::Left ? +c.yaw_mag : -c.yaw_mag);
  const double np_depth = (side == Side::Left ? 0.0931 : 0.0942);

  const Vec3 p0 = Vec3::Zero();
  const Vec3 d0 = direction(c.entry_pitch, 0.0);
  const Vec3 p1 = p0 + c.entry_len * d0;
  const Vec3 d1 = direction(c.central_pitch, yaw);
  const Vec3 p2 = p1 + c.central_len * d1;
  const Vec3 d2 = direction(c.descent_pitch, yaw);
  const double tail = np_depth - c.entry_len - c.central_len + c.overshoot;
  const Vec3 p3 = p2 + tail * d2;

  const double passage = (id == PhantomId::A ? c.passage_radius_a : c.passage_radius_b);
  std::vector<Vec3> pts{p0, p1, p2, p3};
  std::vector<double> radii{c.vestibule_radius, passage, passage, passage};
  return NasalCorridor(std::move(pts), std::move(radii), np_depth, id, side);
}

HeadFixture make_head_fixture() {
  HeadFixture fx;
  // Head frame: x facial-forward, y to the patient's left, z up, origin at
  // the head centre. Markers sit on the face plate around the nose.
  fx.fiducials = {Vec3(0.090, 0.060, 0.020), Vec3(0.090, -0.060, 0.020), Vec3(0.085, 0.055, -0.075),
                  Vec3(0.085, -0.055, -0.075), Vec3(0.100, 0.000, 0.080)};
  // Nostril frames: rotate pi about z so local +x points into the face.
  const Quat q_in(Eigen::AngleAxisd(M_PI, Vec3::UnitZ()));
  fx.nostril_pose_left = {Vec3(0.085, 0.008, -0.045), q_in};
  fx.nostril_pose_right = {Vec3(0.085, -0.008, -0.045), q_in};
  return fx;
}

}  // namespace swabsim
