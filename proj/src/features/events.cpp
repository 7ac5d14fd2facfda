#include "gaitkit/features/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitkit/core/error.hpp"

namespace gaitkit::features {

namespace {

struct Run {
  bool contact = false;
  std::size_t start = 0;
  std::size_t length = 0;
};

void check_config(const EventDetectConfig& cfg) {
  if (!(cfg.threshold_n > 0.0) || !(cfg.min_contact_s > 0.0) || !(cfg.min_flight_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold and minimum durations must be positive");
  }
  if (!(cfg.partial_peak_fraction > 0.0 && cfg.partial_peak_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "partial_peak_fraction must lie in (0, 1]");
  }
  if (cfg.body_weight_n && !(*cfg.body_weight_n > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "body weight must be positive");
  }
}

std::size_t force_column(const TimeSeriesTable& grf, Side side) {
  const std::string name = "fz_" + std::string(side_suffix(side));
  auto idx = grf.find(name);
  if (!idx) throw Error(ErrorCode::MissingForceChannels, "force table lacks '" + name + "'");
  return *idx;
}

std::vector<Run> split_runs(const std::vector<double>& fz, double threshold) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < fz.size(); ++i) {
    const bool c = fz[i] >= threshold;
    if (runs.empty() || runs.back().contact != c) {
      runs.push_back({c, i, 1});
    } else {
      ++runs.back().length;
    }
  }
  return runs;
}

void merge_neighbours(std::vector<Run>& runs) {
  std::vector<Run> merged;
  for (const auto& r : runs) {
    if (!merged.empty() && merged.back().contact == r.contact) {
      merged.back().length += r.length;
    } else {
      merged.push_back(r);
    }
  }
  runs = std::move(merged);
}

void debounce(std::vector<Run>& runs, std::size_t min_contact, std::size_t min_flight) {
  for (;;) {
    std::size_t worst = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& r = runs[i];
      const bool trailing_flight = !r.contact && i + 1 == runs.size();
      if (trailing_flight) continue;
      const bool short_run = r.length < (r.contact ? min_contact : min_flight);
      if (short_run && (worst == runs.size() || r.length < runs[worst].length)) worst = i;
    }
    if (worst == runs.size()) return;
    runs[worst].contact = !runs[worst].contact;
    merge_neighbours(runs);
  }
}

std::size_t to_samples(double seconds, double rate) {
  return static_cast<std::size_t>(std::ceil(seconds * rate - 1e-9));
}

}  // namespace

GaitEvents detect_gait_events(const TimeSeriesTable& grf, const EventDetectConfig& cfg) {
  check_config(cfg);
  std::vector<GaitEvent> events;
  const std::size_t min_contact = to_samples(cfg.min_contact_s, grf.sample_rate());
  const std::size_t min_flight = to_samples(cfg.min_flight_s, grf.sample_rate());
  for (Side side : {Side::Left, Side::Right}) {
    const std::size_t col = force_column(grf, side);
    if (grf.column_has_missing(col)) {
      throw Error(ErrorCode::MissingValuesPresent,
                  "channel '" + grf.channels()[col].name + "' has missing values; impute first");
    }
    auto runs = split_runs(grf.column(col), cfg.threshold_n);
    debounce(runs, min_contact, min_flight);
    for (std::size_t i = 1; i < runs.size(); ++i) {
      const double t = grf.time(runs[i].start);
      if (runs[i].contact) {
        events.push_back({side, EventKind::Touchdown, t});
      } else if (i >= 2) {
        events.push_back({side, EventKind::Toeoff, t});
      }
    }
  }
  if (events.empty()) {
    throw Error(ErrorCode::NoContactsFound,
                "no complete foot contact found at threshold " + std::to_string(cfg.threshold_n) + " N");
  }
  return make_events(std::move(events));
}

GaitEvents discard_partial_contacts(const GaitEvents& ev, const TimeSeriesTable& grf,
                                    const EventDetectConfig& cfg) {
  check_config(cfg);
  if (!cfg.body_weight_n) {
    throw Error(ErrorCode::BodyWeightUnknown, "body weight is required to discard partial contacts");
  }
  const double limit = cfg.partial_peak_fraction * *cfg.body_weight_n;
  const auto& all = ev.events();
  std::vector<bool> drop(all.size(), false);
  for (Side side : {Side::Left, Side::Right}) {
    const std::size_t col = force_column(grf, side);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].foot != side || all[i].kind != EventKind::Touchdown) continue;
      std::size_t j = i + 1;
      while (j < all.size() && all[j].foot != side) ++j;
      const double t_end = j < all.size() ? all[j].time : grf.end_time() + 1.0;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < grf.row_count(); ++r) {
        const double t = grf.time(r);
        if (t < all[i].time - 1e-12 || t >= t_end - 1e-12) continue;
        const double v = grf.rows()[r][col];
        if (!is_missing(v)) peak = std::max(peak, v);
      }
      if (peak < limit) {
        drop[i] = true;
        if (j < all.size()) drop[j] = true;
      }
    }
  }
  std::vector<GaitEvent> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!drop[i]) kept.push_back(all[i]);
  }
  return make_events(std::move(kept));
}

}  // namespace gaitkit::features
