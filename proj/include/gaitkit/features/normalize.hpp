#pragma once

#include <string_view>

#include "gaitkit/core/model.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::features {

/// Resamples `channel` over the cycle_index-th ipsilateral touchdown-to-touchdown
/// interval onto `points` equally spaced instants including both touchdowns.
/// Errors: CycleOutOfRange, ChannelMissing, InvalidArgument (points < 2),
/// MissingValuesPresent (a missing sample inside the cycle).
NormalizedCurve normalize_gait_cycle(const TimeSeriesTable& series, std::string_view channel,
                                     const GaitEvents& ev, Side side, std::size_t cycle_index,
                                     std::size_t points = kDefaultCyclePoints);

}  // namespace gaitkit::features
