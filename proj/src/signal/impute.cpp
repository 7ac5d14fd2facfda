#include "gaitkit/signal/impute.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <random>

namespace gaitkit::signal {

namespace {

constexpr double kMinRecordedFraction = 0.2;
constexpr double kRankThreshold = 1e-10;

std::vector<std::vector<double>> columns_of(const TimeSeriesTable& t) {
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < t.channel_count(); ++c) cols.push_back(t.column(c));
  return cols;
}

}  // namespace

TimeSeriesTable impute_linear(const TimeSeriesTable& table) {
  auto cols = columns_of(table);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    auto& v = cols[c];
    std::vector<std::size_t> known;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!is_missing(v[i])) known.push_back(i);
    }
    if (known.empty()) {
      if (v.empty()) continue;
      throw Error(ErrorCode::AllMissingChannel,
                  "channel '" + table.channels()[c].name + "' has no recorded values");
    }
    for (std::size_t i = 0; i < known.front(); ++i) v[i] = v[known.front()];
    for (std::size_t i = known.back() + 1; i < v.size(); ++i) v[i] = v[known.back()];
    for (std::size_t k = 0; k + 1 < known.size(); ++k) {
      const std::size_t a = known[k], b = known[k + 1];
      for (std::size_t i = a + 1; i < b; ++i) {
        const double u = static_cast<double>(i - a) / static_cast<double>(b - a);
        v[i] = v[a] + u * (v[b] - v[a]);
      }
    }
  }
  return table_from_columns(table.sample_rate(), table.start_time(), table.channels(), cols);
}

TimeSeriesTable impute_chained(const TimeSeriesTable& table, const ChainedOptions& options,
                               Warnings* warnings) {
  const std::size_t p = table.channel_count();
  const std::size_t n = table.row_count();
  if (p < 2) throw Error(ErrorCode::InvalidArgument, "chained imputation needs at least 2 channels");
  if (options.iterations < 0) throw Error(ErrorCode::InvalidArgument, "iterations must be >= 0");
  if (!table.has_missing()) return table;

  auto cols = columns_of(table);
  std::vector<std::vector<bool>> missing(p, std::vector<bool>(n));
  std::vector<double> means(p);
  for (std::size_t c = 0; c < p; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      missing[c][i] = is_missing(cols[c][i]);
      if (!missing[c][i]) {
        sum += cols[c][i];
        ++count;
      }
    }
    if (static_cast<double>(count) < kMinRecordedFraction * static_cast<double>(n) || count == 0) {
      throw Error(ErrorCode::TooSparse, "channel '" + table.channels()[c].name + "' has only " +
                                            std::to_string(count) + " of " + std::to_string(n) +
                                            " values recorded (need 20%)");
    }
    means[c] = sum / static_cast<double>(count);
    for (std::size_t i = 0; i < n; ++i) {
      if (missing[c][i]) cols[c][i] = means[c];
    }
  }

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  if (options.shuffle_order) {
    std::mt19937_64 rng(options.seed);
    for (std::size_t i = p - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
  }

  std::vector<bool> warned(p, false);
  for (int it = 0; it < options.iterations; ++it) {
    for (std::size_t target : order) {
      const auto& miss = missing[target];
      const auto n_missing = static_cast<std::size_t>(std::count(miss.begin(), miss.end(), true));
      if (n_missing == 0) continue;
      const std::size_t n_fit = n - n_missing;
      Eigen::MatrixXd x(n_fit, p);
      Eigen::VectorXd y(n_fit);
      std::size_t r = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (miss[i]) continue;
        x(r, 0) = 1.0;
        std::size_t k = 1;
        for (std::size_t c = 0; c < p; ++c) {
          if (c != target) x(r, k++) = cols[c][i];
        }
        y(r) = cols[target][i];
        ++r;
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
      qr.setThreshold(kRankThreshold);
      if (qr.rank() < static_cast<Eigen::Index>(p)) {
        for (std::size_t i = 0; i < n; ++i) {
          if (miss[i]) cols[target][i] = means[target];
        }
        if (!warned[target]) {
          warn(warnings, "channel '" + table.channels()[target].name +
                             "': regression design is rank deficient; filled with column mean");
          warned[target] = true;
        }
        continue;
      }
      const Eigen::VectorXd beta = qr.solve(y);
      for (std::size_t i = 0; i < n; ++i) {
        if (!miss[i]) continue;
        double pred = beta(0);
        std::size_t k = 1;
        for (std::size_t c = 0; c < p; ++c) {
          if (c != target) pred += beta(static_cast<Eigen::Index>(k++)) * cols[c][i];
        }
        cols[target][i] = pred;
      }
    }
  }
  return table_from_columns(table.sample_rate(), table.start_time(), table.channels(), cols);
}

}  // namespace gaitkit::signal
