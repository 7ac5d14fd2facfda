#pragma once

#include <optional>
#include <vector>

#include "gaitkit/core/model.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::features {

/// Quantities of one ipsilateral touchdown-to-touchdown cycle. Heel positions
/// at event instants are linearly interpolated from the motion table.
struct CycleParams {
  Side side = Side::Left;
  std::size_t index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double gait_time = 0.0;
  std::optional<double> stance_time;    // absent without a toe-off inside the cycle
  std::optional<double> swing_time;     // gait_time - stance_time
  std::optional<double> step_length;    // x ipsilateral heel - x contralateral heel at t_start
  std::optional<double> stride_length;  // |x heel(t_end) - x heel(t_start)|
  std::optional<double> step_width;     // |y left heel - y right heel| at t_start
  /// Time both feet are on the ground within the cycle. Only known once the
  /// contralateral foot has touched down at or before t_start.
  std::optional<double> double_support_time;
};

/// Every complete cycle of both feet, left first, in time order per side.
/// Errors: InsufficientCycles (fewer than two touchdowns on a foot),
/// MarkerMissing (heel markers).
std::vector<CycleParams> cycle_params(const TimeSeriesTable& motion, const MarkerSet& markers,
                                      const GaitEvents& ev);

/// Trial summary over all complete cycles. Per-side fields average that side's
/// cycles; stride_length, step_width, gait_time and double_support_time average
/// the cycles of both sides. Cadence (120 / gait_time), gait speed
/// (stride_length / gait_time) and swing (gait_time - stance) derive from the
/// averages, so stance + swing = gait_time holds exactly per side.
SpatiotemporalRow spatiotemporal_params(const TimeSeriesTable& motion, const MarkerSet& markers,
                                        const GaitEvents& ev);

/// Summary of already computed cycles (same aggregation as above).
SpatiotemporalRow summarize_cycles(const std::vector<CycleParams>& cycles);

}  // namespace gaitkit::features
