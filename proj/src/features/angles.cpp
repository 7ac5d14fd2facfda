#include "gaitkit/features/angles.hpp"

#include <cmath>
#include <numbers>

#include "gaitkit/core/error.hpp"
#include "gaitkit/formats/canonical_csv.hpp"

namespace gaitkit::features {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Locator {
  const TimeSeriesTable& motion;
  const MarkerSet& markers;

  MarkerColumns sided(MarkerRole role, Side side) const {
    auto p = markers.prefix(role, side);
    if (!p) {
      throw Error(ErrorCode::MarkerMissing, std::string(role_name(role)) + " " +
                                                std::string(side_name(side)) + " is not mapped");
    }
    return resolve_marker(motion, *p);
  }

  // Central marker, or the pair of sided markers to average.
  std::vector<MarkerColumns> trunk_point(MarkerRole role) const {
    if (auto c = markers.central(role)) return {resolve_marker(motion, *c)};
    return {sided(role, Side::Left), sided(role, Side::Right)};
  }
};

Point3 point(const std::vector<double>& row, const MarkerColumns& m) {
  return {row[m.x], row[m.y], row[m.z]};
}

Point3 mean_point(const std::vector<double>& row, const std::vector<MarkerColumns>& ms) {
  Point3 p;
  for (const auto& m : ms) {
    p.x += row[m.x];
    p.y += row[m.y];
    p.z += row[m.z];
  }
  const double n = static_cast<double>(ms.size());
  return {p.x / n, p.y / n, p.z / n};
}

double segment_angle(const Point3& proximal, const Point3& distal) {
  return std::atan2(proximal.x - distal.x, proximal.z - distal.z) * kDeg;
}

}  // namespace

TimeSeriesTable joint_angles_from_motion(const TimeSeriesTable& motion, const MarkerSet& markers) {
  const Locator loc{motion, markers};
  const auto sho = loc.trunk_point(MarkerRole::Shoulder);
  const auto hip_c = loc.trunk_point(MarkerRole::Hip);
  struct Limb {
    MarkerColumns hip, knee, ankle, heel, toe;
  };
  Limb limbs[2];
  for (Side side : {Side::Left, Side::Right}) {
    auto& l = limbs[side == Side::Left ? 0 : 1];
    l.hip = loc.sided(MarkerRole::Hip, side);
    l.knee = loc.sided(MarkerRole::Knee, side);
    l.ankle = loc.sided(MarkerRole::Ankle, side);
    l.heel = loc.sided(MarkerRole::Heel, side);
    l.toe = loc.sided(MarkerRole::Toe, side);
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(motion.row_count());
  for (const auto& row : motion.rows()) {
    std::vector<double> out(9);
    out[0] = segment_angle(mean_point(row, sho), mean_point(row, hip_c));
    for (int s = 0; s < 2; ++s) {
      const auto& l = limbs[s];
      const double thigh = segment_angle(point(row, l.hip), point(row, l.knee));
      const double shank = segment_angle(point(row, l.knee), point(row, l.ankle));
      const Point3 heel = point(row, l.heel);
      const Point3 toe = point(row, l.toe);
      const double foot = std::atan2(toe.z - heel.z, toe.x - heel.x) * kDeg;
      out[1 + s] = thigh;
      out[3 + s] = shank;
      out[5 + s] = foot;
      out[7 + s] = thigh - shank;
    }
    rows.push_back(std::move(out));
  }
  std::vector<Channel> channels;
  for (const auto& name : formats::schema_channels(formats::CanonicalKind::JointAngles)) {
    channels.push_back({name, Unit::Degree});
  }
  return TimeSeriesTable(motion.sample_rate(), motion.start_time(), std::move(channels),
                         std::move(rows));
}

}  // namespace gaitkit::features
