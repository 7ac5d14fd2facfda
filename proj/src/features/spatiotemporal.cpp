#include "gaitkit/features/spatiotemporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitkit/core/error.hpp"

namespace gaitkit::features {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

// Contact intervals [touchdown, toe-off) of one foot. A touchdown without a
// following toe-off stays in contact until the end of the record.
std::vector<Interval> contacts(const GaitEvents& ev, Side foot) {
  std::vector<Interval> out;
  for (const auto& e : ev.events()) {
    if (e.foot != foot) continue;
    if (e.kind == EventKind::Touchdown) {
      out.push_back({e.time, kInf});
    } else if (!out.empty()) {
      out.back().end = e.time;
    }
  }
  return out;
}

double overlap(const std::vector<Interval>& a, const std::vector<Interval>& b, Interval window) {
  double total = 0.0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      const double lo = std::max({x.begin, y.begin, window.begin});
      const double hi = std::min({x.end, y.end, window.end});
      if (hi > lo) total += hi - lo;
    }
  }
  return total;
}

std::optional<double> finite(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> value() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

}  // namespace

std::vector<CycleParams> cycle_params(const TimeSeriesTable& motion, const MarkerSet& markers,
                                      const GaitEvents& ev) {
  for (Side side : {Side::Left, Side::Right}) {
    const auto n = ev.touchdowns(side).size();
    if (n < 2) {
      throw Error(ErrorCode::InsufficientCycles,
                  std::string(side_name(side)) + " foot has " + std::to_string(n) +
                      " touchdown(s); at least 2 are needed for a complete cycle");
    }
  }
  MarkerColumns heel[2];
  for (Side side : {Side::Left, Side::Right}) {
    auto p = markers.prefix(MarkerRole::Heel, side);
    if (!p) {
      throw Error(ErrorCode::MarkerMissing, "HEE " + std::string(side_name(side)) + " is not mapped");
    }
    heel[side == Side::Left ? 0 : 1] = resolve_marker(motion, *p);
  }
  auto heel_x = [&](Side s, double t) {
    return interpolate_at(motion, heel[s == Side::Left ? 0 : 1].x, t);
  };
  auto heel_y = [&](Side s, double t) {
    return interpolate_at(motion, heel[s == Side::Left ? 0 : 1].y, t);
  };
  const std::vector<Interval> contact[2] = {contacts(ev, Side::Left), contacts(ev, Side::Right)};

  std::vector<CycleParams> out;
  for (Side side : {Side::Left, Side::Right}) {
    const Side contra = other(side);
    const auto tds = ev.touchdowns(side);
    const auto tos = ev.times(side, EventKind::Toeoff);
    const auto contra_tds = ev.touchdowns(contra);
    for (std::size_t k = 0; k + 1 < tds.size(); ++k) {
      CycleParams c;
      c.side = side;
      c.index = k;
      c.t_start = tds[k];
      c.t_end = tds[k + 1];
      c.gait_time = c.t_end - c.t_start;
      auto to = std::find_if(tos.begin(), tos.end(),
                             [&](double t) { return t > c.t_start && t < c.t_end; });
      if (to != tos.end()) {
        c.stance_time = *to - c.t_start;
        c.swing_time = c.gait_time - *c.stance_time;
      }
      c.step_length = finite(heel_x(side, c.t_start) - heel_x(contra, c.t_start));
      c.stride_length = finite(std::abs(heel_x(side, c.t_end) - heel_x(side, c.t_start)));
      c.step_width = finite(std::abs(heel_y(Side::Left, c.t_start) - heel_y(Side::Right, c.t_start)));
      if (!contra_tds.empty() && contra_tds.front() <= c.t_start) {
        c.double_support_time = overlap(contact[side == Side::Left ? 0 : 1],
                                        contact[contra == Side::Left ? 0 : 1],
                                        {c.t_start, c.t_end});
      }
      out.push_back(c);
    }
  }
  return out;
}

SpatiotemporalRow summarize_cycles(const std::vector<CycleParams>& cycles) {
  Mean step[2], stance[2], stride, width, gait, ds;
  for (const auto& c : cycles) {
    const int s = c.side == Side::Left ? 0 : 1;
    step[s].add(c.step_length);
    stance[s].add(c.stance_time);
    stride.add(c.stride_length);
    width.add(c.step_width);
    gait.add(c.gait_time);
    ds.add(c.double_support_time);
  }
  SpatiotemporalRow row;
  row.step_length_l = step[0].value();
  row.step_length_r = step[1].value();
  row.stride_length = stride.value();
  row.step_width = width.value();
  row.gait_time = gait.value();
  row.double_support_time = ds.value();
  row.stance_time_l = stance[0].value();
  row.stance_time_r = stance[1].value();
  if (row.gait_time) {
    row.cadence = 120.0 / *row.gait_time;
    if (row.stride_length) row.gait_speed = *row.stride_length / *row.gait_time;
    if (row.stance_time_l) row.swing_time_l = *row.gait_time - *row.stance_time_l;
    if (row.stance_time_r) row.swing_time_r = *row.gait_time - *row.stance_time_r;
  }
  return row;
}

SpatiotemporalRow spatiotemporal_params(const TimeSeriesTable& motion, const MarkerSet& markers,
                                        const GaitEvents& ev) {
  return summarize_cycles(cycle_params(motion, markers, ev));
}

}  // namespace gaitkit::features
