#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaitkit {

/// Sentinel for a sample that was not recorded. NaN never compares equal to
/// anything, finite values included.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

enum class Unit { Meter, Newton, Degree, Volt, Unitless };

std::string_view unit_name(Unit u) noexcept;
/// Maps a source unit string onto the closed set; unknown strings yield nullopt.
std::optional<Unit> parse_unit(std::string_view text) noexcept;

struct Channel {
  std::string name;
  Unit unit = Unit::Unitless;

  bool operator==(const Channel&) const = default;
};

/// Uniformly sampled, named-channel table. Row i is sampled at
/// start_time + i / sample_rate. Construction does not enforce invariants so
/// that foreign data can be inspected with validate_table().
class TimeSeriesTable {
 public:
  TimeSeriesTable() = default;
  TimeSeriesTable(double sample_rate, double start_time, std::vector<Channel> channels,
                  std::vector<std::vector<double>> rows)
      : sample_rate_(sample_rate),
        start_time_(start_time),
        channels_(std::move(channels)),
        rows_(std::move(rows)) {}

  double sample_rate() const noexcept { return sample_rate_; }
  double start_time() const noexcept { return start_time_; }
  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t channel_count() const noexcept { return channels_.size(); }

  double time(std::size_t row) const noexcept {
    return start_time_ + static_cast<double>(row) / sample_rate_;
  }
  /// Time of the last row, or start_time for an empty table.
  double end_time() const noexcept { return rows_.empty() ? start_time_ : time(rows_.size() - 1); }

  double at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

  std::optional<std::size_t> find(std::string_view name) const noexcept;
  /// Like find(), but throws ChannelMissing.
  std::size_t index_of(std::string_view name) const;

  std::vector<double> column(std::size_t col) const;
  std::vector<double> column(std::string_view name) const { return column(index_of(name)); }

  bool has_missing() const noexcept;
  bool column_has_missing(std::size_t col) const noexcept;

  /// Copy with one column replaced; `values` must have row_count() entries.
  TimeSeriesTable with_column(std::size_t col, std::span<const double> values) const;
  /// Copy keeping only the named channels, in the given order.
  TimeSeriesTable select(std::span<const std::string> names) const;

  bool operator==(const TimeSeriesTable& other) const;

 private:
  double sample_rate_ = 1.0;
  double start_time_ = 0.0;
  std::vector<Channel> channels_;
  std::vector<std::vector<double>> rows_;
};

/// Builds a table from column vectors of equal length.
TimeSeriesTable table_from_columns(double sample_rate, double start_time,
                                   std::vector<Channel> channels,
                                   const std::vector<std::vector<double>>& columns);

struct Violation {
  std::string where;   // channel name, "row <i>", or "sample_rate"
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Returns every broken table invariant; an empty list means the table is valid.
std::vector<Violation> validate_table(const TimeSeriesTable& table);

/// Linear interpolation of one column at an absolute time. Times outside the
/// sampled span are clamped to the first/last row. Propagates missing.
double interpolate_at(const TimeSeriesTable& table, std::size_t col, double t);

}  // namespace gaitkit
