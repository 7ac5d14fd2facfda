#include "gaitkit/formats/axes.hpp"

#include <map>
#include <string>

#include "gaitkit/core/error.hpp"
#include "text_util.hpp"

namespace gaitkit::formats {

AxisMap parse_axis_map(std::string_view spec) {
  const auto parts = detail::split_fields(spec, ',');
  if (parts.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "axis map needs three comma-separated axes, e.g. x,-z,y");
  }
  AxisMap map;
  bool used[3] = {false, false, false};
  for (std::size_t i = 0; i < 3; ++i) {
    auto p = detail::trim(parts[i]);
    double sign = 1.0;
    if (!p.empty() && (p.front() == '-' || p.front() == '+')) {
      sign = p.front() == '-' ? -1.0 : 1.0;
      p.remove_prefix(1);
    }
    if (p.size() != 1 || p[0] < 'x' || p[0] > 'z') {
      throw Error(ErrorCode::InvalidArgument, "axis '" + std::string(parts[i]) + "' is not x, y or z");
    }
    const int axis = p[0] - 'x';
    if (used[axis]) throw Error(ErrorCode::InvalidArgument, "axis map uses '" + std::string(p) + "' twice");
    used[axis] = true;
    map[i] = {axis, sign};
  }
  return map;
}

TimeSeriesTable remap_axes(const TimeSeriesTable& table, const AxisMap& map) {
  std::map<std::string, std::array<int, 3>> triples;
  const auto& channels = table.channels();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& name = channels[c].name;
    if (name.size() < 3 || name[name.size() - 2] != '_') continue;
    const char a = name.back();
    if (a < 'x' || a > 'z') continue;
    auto& t = triples.try_emplace(name.substr(0, name.size() - 2), std::array<int, 3>{-1, -1, -1})
                  .first->second;
    t[a - 'x'] = static_cast<int>(c);
  }
  auto rows = table.rows();
  for (auto& row : rows) {
    for (const auto& [prefix, cols] : triples) {
      if (cols[0] < 0 || cols[1] < 0 || cols[2] < 0) continue;
      const double src[3] = {row[cols[0]], row[cols[1]], row[cols[2]]};
      for (int d = 0; d < 3; ++d) row[cols[d]] = map[d].sign * src[map[d].axis];
    }
  }
  return TimeSeriesTable(table.sample_rate(), table.start_time(), channels, std::move(rows));
}

}  // namespace gaitkit::formats
