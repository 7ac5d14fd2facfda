#pragma once

#include <optional>

#include "gaitkit/core/model.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::features {

struct EventDetectConfig {
  double threshold_n = 10.0;
  double min_contact_s = 0.1;
  double min_flight_s = 0.05;
  double partial_peak_fraction = 0.6;
  std::optional<double> body_weight_n;
};

/// Threshold-crossing events on fz_l / fz_r.
///
/// Each foot's trace is split into contact (fz >= threshold) and flight runs.
/// Contacts shorter than min_contact_s and flights shorter than min_flight_s
/// are merged into their neighbours, shortest first, until none remain. A
/// trailing flight is exempt. A contact already under way at the first sample
/// yields neither touchdown nor toe-off since its start is unknown.
///
/// Errors: MissingForceChannels, MissingValuesPresent, NoContactsFound,
/// InvalidArgument.
GaitEvents detect_gait_events(const TimeSeriesTable& grf, const EventDetectConfig& cfg = {});

/// Drops every touchdown/toe-off pair whose peak fz over [touchdown, toe-off)
/// stays below partial_peak_fraction * body weight.
/// Errors: BodyWeightUnknown, MissingForceChannels.
GaitEvents discard_partial_contacts(const GaitEvents& ev, const TimeSeriesTable& grf,
                                    const EventDetectConfig& cfg);

}  // namespace gaitkit::features
