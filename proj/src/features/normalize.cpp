#include "gaitkit/features/normalize.hpp"

#include "gaitkit/core/error.hpp"

namespace gaitkit::features {

NormalizedCurve normalize_gait_cycle(const TimeSeriesTable& series, std::string_view channel,
                                     const GaitEvents& ev, Side side, std::size_t cycle_index,
                                     std::size_t points) {
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "a cycle curve needs at least 2 points");
  const std::size_t col = series.index_of(channel);
  const CycleWindow w = cycle_window(ev, side, cycle_index);
  NormalizedCurve curve;
  curve.variable = std::string(channel);
  curve.side = side;
  curve.cycle_index = cycle_index;
  curve.values.resize(points);
  const double span = w.t_end - w.t_start;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = i + 1 == points
                         ? w.t_end
                         : w.t_start + span * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = interpolate_at(series, col, t);
    if (is_missing(v)) {
      throw Error(ErrorCode::MissingValuesPresent,
                  "channel '" + std::string(channel) + "' is missing inside the selected cycle");
    }
    curve.values[i] = v;
  }
  return curve;
}

}  // namespace gaitkit::features
