#include "gaitkit/signal/resample.hpp"

#include <cmath>

#include "gaitkit/core/error.hpp"

namespace gaitkit::signal {

TimeSeriesTable resample(const TimeSeriesTable& table, double target_hz) {
  if (!(target_hz > 0.0) || !std::isfinite(target_hz)) {
    throw Error(ErrorCode::InvalidArgument, "target rate must be positive");
  }
  if (table.has_missing()) {
    throw Error(ErrorCode::MissingValuesPresent, "table has missing values; impute first");
  }
  const std::size_t n = table.row_count();
  std::vector<std::vector<double>> rows;
  if (n > 0) {
    const double ratio = table.sample_rate() / target_hz;  // source samples per target sample
    // Small slack so that the last source sample is kept despite rounding.
    const auto count = static_cast<std::size_t>(std::floor((n - 1) / ratio + 1e-9)) + 1;
    rows.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double u = std::min(static_cast<double>(k) * ratio, static_cast<double>(n - 1));
      const auto i = static_cast<std::size_t>(std::floor(u));
      const double f = u - static_cast<double>(i);
      const auto& a = table.rows()[i];
      if (f == 0.0 || i + 1 >= n) {
        rows.push_back(a);
        continue;
      }
      const auto& b = table.rows()[i + 1];
      std::vector<double> row(a.size());
      for (std::size_t c = 0; c < a.size(); ++c) row[c] = a[c] + f * (b[c] - a[c]);
      rows.push_back(std::move(row));
    }
  }
  return TimeSeriesTable(target_hz, table.start_time(), table.channels(), std::move(rows));
}

}  // namespace gaitkit::signal
