#pragma once

#include <span>
#include <string>
#include <vector>

#include "gaitkit/core/table.hpp"

namespace gaitkit::signal {

/// Low-pass specification. `order` is the order of the one-pass filter; the
/// zero-phase variant runs it forward and backward, squaring the magnitude.
struct FilterSpec {
  double cutoff_hz = 6.0;
  int order = 4;
  bool zero_phase = true;
};

/// Conventional gait-lab defaults.
inline constexpr FilterSpec kKinematicsFilter{6.0, 4, true};
inline constexpr FilterSpec kForceFilter{20.0, 4, true};

/// One second-order section, transposed direct form II, a0 = 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Digital Butterworth low-pass (bilinear transform with pre-warping) as
/// order/2 cascaded sections, each with unit DC gain.
std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate);

/// Filters one signal. Errors: CutoffAboveNyquist, TooFewSamples,
/// MissingValuesPresent, InvalidArgument (bad order or cutoff).
std::vector<double> lowpass(std::span<const double> x, const FilterSpec& spec, double sample_rate);

/// Applies `lowpass` to the named channels (all channels when empty).
/// Names, units, sample rate, start time and row count are preserved.
TimeSeriesTable lowpass_filter(const TimeSeriesTable& table, const FilterSpec& spec,
                               std::span<const std::string> channels = {});

}  // namespace gaitkit::signal
