#pragma once

#include "gaitkit/core/table.hpp"

namespace gaitkit::signal {

/// Linear interpolation onto start_time + k / target_hz for every k whose
/// instant lies inside the original span. Errors: MissingValuesPresent,
/// InvalidArgument.
TimeSeriesTable resample(const TimeSeriesTable& table, double target_hz);

}  // namespace gaitkit::signal
