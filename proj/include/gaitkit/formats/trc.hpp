#pragma once

#include <string_view>

#include "gaitkit/core/error.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::formats {

/// Reads a tab-separated TRC marker file into a motion table with channels
/// <marker>_x/_y/_z in meters. Blank coordinate cells become missing.
/// Errors: HeaderMalformed, MarkerCountMismatch, NonUniformTime, RaggedRow.
TimeSeriesTable parse_trc(std::string_view text, Warnings* warnings = nullptr);

}  // namespace gaitkit::formats
