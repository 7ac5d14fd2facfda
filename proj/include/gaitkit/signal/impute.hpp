#pragma once

#include <cstdint>

#include "gaitkit/core/error.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::signal {

/// Fills interior gaps by linear interpolation in time and leading/trailing
/// gaps with the nearest recorded value. Errors: AllMissingChannel.
TimeSeriesTable impute_linear(const TimeSeriesTable& table);

struct ChainedOptions {
  int iterations = 10;
  std::uint64_t seed = 0;
  /// Visit channels in a seed-determined order instead of declared order.
  bool shuffle_order = false;
};

/// Deterministic chained-equation imputation: missing cells start at the
/// column mean, then each round regresses every incomplete channel on all
/// others (ordinary least squares with intercept, fitted on the rows where the
/// target was recorded) and overwrites its missing cells with the prediction.
/// A singular design leaves that channel at its mean and adds a warning.
/// Errors: TooSparse (a channel under 20% recorded), InvalidArgument.
TimeSeriesTable impute_chained(const TimeSeriesTable& table, const ChainedOptions& options = {},
                               Warnings* warnings = nullptr);

}  // namespace gaitkit::signal
