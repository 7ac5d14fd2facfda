#include "gaitkit/stats/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitkit/core/error.hpp"

namespace gaitkit::stats {

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0) || !(df > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "t quantile needs p in (0, 1) and df > 0");
  }
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

EnsembleSummary ensemble_mean_ci(std::vector<NormalizedCurve> curves, double alpha) {
  if (curves.empty()) throw Error(ErrorCode::EmptyEnsemble, "no curves to summarise");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  const std::size_t points = curves.front().values.size();
  for (const auto& c : curves) {
    if (c.values.size() != points) {
      throw Error(ErrorCode::LengthMismatch, "curve lengths differ: " + std::to_string(points) +
                                                 " vs " + std::to_string(c.values.size()));
    }
  }
  EnsembleSummary out;
  out.n = curves.size();
  out.alpha = alpha;
  out.mean.resize(points);
  out.ci_low.resize(points);
  out.ci_high.resize(points);
  const double n = static_cast<double>(out.n);
  const double t = out.n > 1 ? t_quantile(1.0 - alpha / 2.0, n - 1.0) : 0.0;
  std::vector<double> column(out.n);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t k = 0; k < out.n; ++k) column[k] = curves[k].values[i];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    const double mean = sum / n;
    double half = 0.0;
    if (out.n > 1) {
      double ss = 0.0;
      for (double v : column) ss += (v - mean) * (v - mean);
      half = t * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    out.mean[i] = mean;
    out.ci_low[i] = mean - half;
    out.ci_high[i] = mean + half;
  }
  out.per_trial = std::move(curves);
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(const std::vector<RefValue>& values) {
  std::vector<double> data;
  for (const auto& [ref, v] : values) {
    if (std::isfinite(v)) data.push_back(v);
  }
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "box plot needs at least one finite value");
  std::sort(data.begin(), data.end());
  BoxStats b;
  b.n = data.size();
  b.min = data.front();
  b.max = data.back();
  b.q1 = quantile_sorted(data, 0.25);
  b.median = quantile_sorted(data, 0.5);
  b.q3 = quantile_sorted(data, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_low = b.q1;
  b.whisker_high = b.q3;
  for (double v : data) {
    if (v >= lo_fence) {
      b.whisker_low = std::min(v, b.q1);
      break;
    }
  }
  for (auto it = data.rbegin(); it != data.rend(); ++it) {
    if (*it <= hi_fence) {
      b.whisker_high = std::max(*it, b.q3);
      break;
    }
  }
  for (const auto& rv : values) {
    if (std::isfinite(rv.second) && (rv.second < b.whisker_low || rv.second > b.whisker_high)) {
      b.outliers.push_back(rv);
    }
  }
  return b;
}

RadarSummary radar_summary(const std::vector<SpatiotemporalRow>& rows_a,
                           const std::vector<SpatiotemporalRow>& rows_b) {
  if (rows_a.empty()) throw Error(ErrorCode::EmptyGroupA, "group A has no trials");
  RadarSummary out;
  for (const auto& field : SpatiotemporalRow::fields()) {
    RadarAxis axis;
    axis.parameter = std::string(field.name);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto mean_of = [&](const std::vector<SpatiotemporalRow>& rows) -> std::optional<double> {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : rows) {
        const auto& v = r.*field.member;
        if (!v || !std::isfinite(*v)) continue;
        sum += *v;
        ++n;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
      }
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    };
    axis.mean_a = mean_of(rows_a);
    axis.mean_b = mean_of(rows_b);
    if (axis.mean_a || axis.mean_b) {
      const double pad = 0.05 * (hi - lo);
      axis.axis_min = lo - pad;
      axis.axis_max = hi + pad;
      auto normalize = [&](double m) {
        if (!(axis.axis_max > axis.axis_min)) return 0.5;
        return (m - axis.axis_min) / (axis.axis_max - axis.axis_min);
      };
      if (axis.mean_a) axis.normalized_a = normalize(*axis.mean_a);
      if (axis.mean_b) axis.normalized_b = normalize(*axis.mean_b);
    }
    out.axes.push_back(std::move(axis));
  }
  return out;
}

std::set<TrialRef> highlight_range_filter(const std::vector<RefValue>& values, double lo, double hi) {
  std::set<TrialRef> out;
  for (const auto& [ref, v] : values) {
    if (v >= lo && v <= hi) out.insert(ref);
  }
  return out;
}

}  // namespace gaitkit::stats
