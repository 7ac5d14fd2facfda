#include "gaitkit/signal/filter.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <numbers>

#include "gaitkit/core/error.hpp"

namespace gaitkit::signal {

namespace {

std::string hz_text(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

void check_spec(const FilterSpec& spec, double sample_rate) {
  if (spec.order < 2 || spec.order % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "filter order must be an even integer >= 2, got " + std::to_string(spec.order));
  }
  if (!(spec.cutoff_hz > 0.0) || !std::isfinite(spec.cutoff_hz)) {
    throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  }
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  if (spec.cutoff_hz >= sample_rate / 2.0) {
    throw Error(ErrorCode::CutoffAboveNyquist,
                "cutoff " + hz_text(spec.cutoff_hz) + " Hz is not below Nyquist (" + hz_text(sample_rate / 2.0) +
                    " Hz)");
  }
}

// Runs the cascade over x in place, starting from rest.
void run_cascade(const std::vector<Biquad>& sections, std::vector<double>& x) {
  for (const auto& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

// Filters around the first sample so that a constant input passes unchanged.
void run_from_rest(const std::vector<Biquad>& sections, std::vector<double>& x) {
  if (x.empty()) return;
  const double base = x.front();
  for (double& v : x) v -= base;
  run_cascade(sections, x);
  for (double& v : x) v += base;
}

void forward_backward(const std::vector<Biquad>& sections, std::vector<double>& x) {
  run_from_rest(sections, x);
  std::reverse(x.begin(), x.end());
  run_from_rest(sections, x);
  std::reverse(x.begin(), x.end());
}

}  // namespace

std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
  check_spec(FilterSpec{cutoff_hz, order, false}, sample_rate);
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  for (int i = 0; i < order / 2; ++i) {
    const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order);
    const double q = 2.0 * std::sin(theta);
    const double norm = 1.0 / (1.0 + q * k + k2);
    Biquad s;
    s.b0 = k2 * norm;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - q * k + k2) * norm;
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> lowpass(std::span<const double> x, const FilterSpec& spec, double sample_rate) {
  check_spec(spec, sample_rate);
  const std::size_t min_samples = 3 * static_cast<std::size_t>(spec.order);
  if (x.size() < min_samples) {
    throw Error(ErrorCode::TooFewSamples, "filter needs at least " + std::to_string(min_samples) +
                                              " samples, got " + std::to_string(x.size()));
  }
  if (std::any_of(x.begin(), x.end(), [](double v) { return !std::isfinite(v); })) {
    throw Error(ErrorCode::MissingValuesPresent, "signal contains missing values; impute first");
  }
  const auto sections = butterworth_lowpass(spec.order, spec.cutoff_hz, sample_rate);

  if (!spec.zero_phase) {
    std::vector<double> y(x.begin(), x.end());
    run_from_rest(sections, y);
    return y;
  }

  // Odd reflection about each end point.
  const std::size_t n = x.size();
  const std::size_t pad = std::min(min_samples, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  // Averaging both pass orders makes the result exactly reversal-symmetric.
  std::vector<double> a = ext;
  forward_backward(sections, a);
  std::vector<double> b(ext.rbegin(), ext.rend());
  forward_backward(sections, b);
  std::reverse(b.begin(), b.end());

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * (a[pad + i] + b[pad + i]);
  return y;
}

TimeSeriesTable lowpass_filter(const TimeSeriesTable& table, const FilterSpec& spec,
                               std::span<const std::string> channels) {
  check_spec(spec, table.sample_rate());
  std::vector<std::size_t> targets;
  if (channels.empty()) {
    for (std::size_t c = 0; c < table.channel_count(); ++c) targets.push_back(c);
  } else {
    for (const auto& name : channels) targets.push_back(table.index_of(name));
  }
  TimeSeriesTable out = table;
  for (std::size_t c : targets) {
    if (table.column_has_missing(c)) {
      throw Error(ErrorCode::MissingValuesPresent,
                  "channel '" + table.channels()[c].name + "' has missing values; impute first");
    }
    out = out.with_column(c, lowpass(table.column(c), spec, table.sample_rate()));
  }
  return out;
}

}  // namespace gaitkit::signal
