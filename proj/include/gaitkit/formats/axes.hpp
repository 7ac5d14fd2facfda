#pragma once

#include <array>
#include <string_view>

#include "gaitkit/core/table.hpp"

namespace gaitkit::formats {

/// Source axis and sign feeding one destination axis.
struct AxisSource {
  int axis = 0;  // 0 = x, 1 = y, 2 = z
  double sign = 1.0;
};

using AxisMap = std::array<AxisSource, 3>;

/// Parses "x,-z,y": the new x is the old x, the new y is minus the old z and
/// the new z is the old y. Each source axis must appear exactly once.
/// Errors: InvalidArgument.
AxisMap parse_axis_map(std::string_view spec);

/// Applies the map to every complete <prefix>_x/_y/_z channel triple; other
/// channels pass through unchanged.
TimeSeriesTable remap_axes(const TimeSeriesTable& table, const AxisMap& map);

}  // namespace gaitkit::formats
