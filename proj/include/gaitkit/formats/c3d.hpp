#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaitkit/core/error.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::formats {

/// Marker trajectories plus analog channels as read from a C3D file.
/// `points` has channels <label>_x/_y/_z in meters; `analog` is sampled at an
/// integer multiple of the point rate.
struct RawCapture {
  TimeSeriesTable points;
  TimeSeriesTable analog;
  std::vector<std::string> point_labels;
  std::vector<std::string> analog_labels;
};

/// Reads an Intel-processor C3D file (float or integer storage).
/// Errors: MagicMismatch, UnsupportedProcessor, TruncatedData, ParameterCorrupt.
/// Never reads outside `bytes`.
RawCapture parse_c3d(std::span<const std::uint8_t> bytes, Warnings* warnings = nullptr);

/// Writes an Intel, floating-point C3D that parse_c3d reads back within one
/// float32 ulp per value. Errors: CapacityExceeded (more than 65535 frames,
/// 255 markers or 255 analog channels), InvalidArgument (analog rate is not an
/// integer multiple of the point rate, or row counts disagree).
std::vector<std::uint8_t> write_c3d(const RawCapture& capture);

}  // namespace gaitkit::formats
