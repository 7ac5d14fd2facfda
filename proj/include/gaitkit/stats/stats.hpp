#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gaitkit/core/model.hpp"

namespace gaitkit::stats {

struct EnsembleSummary {
  std::vector<NormalizedCurve> per_trial;
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::size_t n = 0;
  double alpha = 0.05;
};

/// Two-sided Student-t quantile t(p, df).
double t_quantile(double p, double df);

/// Pointwise mean and mean +- t(1 - alpha/2, n - 1) * s / sqrt(n), with s the
/// sample standard deviation. A single curve gives a collapsed band. Values at
/// each point are summed in sorted order, so the result does not depend on
/// the order of the curves.
/// Errors: EmptyEnsemble, LengthMismatch, InvalidArgument (alpha outside (0, 1)).
EnsembleSummary ensemble_mean_ci(std::vector<NormalizedCurve> curves, double alpha = 0.05);

using RefValue = std::pair<TrialRef, double>;

struct BoxStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double whisker_low = 0.0, whisker_high = 0.0;
  std::vector<RefValue> outliers;  // input order
  std::size_t n = 0;
};

/// Quantile of sorted data by linear interpolation at h = (n - 1) p.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Box-plot statistics over the finite values. Whiskers reach the furthest
/// values inside the 1.5 IQR fences and never cut into the box.
/// Errors: EmptyInput.
BoxStats box_stats(const std::vector<RefValue>& values);

struct RadarAxis {
  std::string parameter;
  std::optional<double> mean_a;
  std::optional<double> mean_b;
  double axis_min = 0.0;
  double axis_max = 0.0;
  std::optional<double> normalized_a;
  std::optional<double> normalized_b;
};

struct RadarSummary {
  std::vector<RadarAxis> axes;  // spatiotemporal field order
};

/// Per-parameter group means with shared axis bounds: min/max over both
/// groups' trial values, padded by 5% of the range on each side. Parameters
/// without any value are left with absent means.
/// Errors: EmptyGroupA.
RadarSummary radar_summary(const std::vector<SpatiotemporalRow>& rows_a,
                           const std::vector<SpatiotemporalRow>& rows_b);

/// Refs whose value lies in [lo, hi].
std::set<TrialRef> highlight_range_filter(const std::vector<RefValue>& values, double lo, double hi);

}  // namespace gaitkit::stats
