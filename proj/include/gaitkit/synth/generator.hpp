#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gaitkit/core/model.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::synth {

/// Parameters of a periodic synthetic walk. Each foot is planted flat for
/// `stance_fraction` of the cycle and swings with a quintic ease in between.
/// The left foot's first recorded touchdown opens the first cycle; the right
/// foot is already in contact when the record starts.
struct GaitConfig {
  double cadence = 100.0;          // steps/min; cycle duration T = 120 / cadence
  double step_length_l = 0.6;      // m
  double step_length_r = 0.6;      // m
  double step_width = 0.12;        // m
  double stance_fraction = 0.6;    // in (0.5, 1)
  double body_weight_n = 700.0;
  std::size_t cycles = 4;          // complete left cycles (right gets cycles - 1)
  double motion_rate = 120.0;
  double grf_rate = 600.0;
  double fx_offset_n = 0.0;        // added to fx_l / fx_r over the whole record
  double fz_offset_n = 0.0;        // added to fz_l / fz_r over the whole record
  /// Low-peak left contact at [0.1, 0.25] s with the heel far behind the
  /// right foot, ahead of the regular walk.
  bool half_landing = false;
  std::size_t blips = 0;           // short force spikes during flight (10-45 ms)
  std::size_t dropouts = 0;        // short force gaps during stance (10-45 ms)
  std::uint64_t seed = 1;

  double cycle_time() const { return 120.0 / cadence; }
  double gait_speed() const { return (step_length_l + step_length_r) / cycle_time(); }
  /// Sets the cadence that yields `speed` with the current step lengths.
  void set_speed(double speed);
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

struct SynthTrial {
  TimeSeriesTable motion;  // SHO/HIP/KNE/ANK/HEE/TOE _L/_R, standard marker names
  TimeSeriesTable grf;     // canonical grf channels
  GaitEvents events;       // every contact in the record, half landing included
  GaitEvents clean_events; // without the half landing
  SpatiotemporalRow truth; // parameters of the regular walk
  /// Per-field error bound for parameters computed from events detected at
  /// grf resolution and heel positions interpolated at motion resolution.
  SpatiotemporalRow tolerance;
  std::vector<Interval> blips;
  std::vector<Interval> dropouts;
  double body_weight_n = 0.0;
};

/// Errors: InvalidArgument for configurations outside the supported range.
SynthTrial generate(const GaitConfig& config);

}  // namespace gaitkit::synth
