#include "gaitkit/core/table.hpp"

#include <algorithm>
#include <set>

#include "gaitkit/core/error.hpp"

namespace gaitkit {

std::string_view unit_name(Unit u) noexcept {
  switch (u) {
    case Unit::Meter: return "m";
    case Unit::Newton: return "N";
    case Unit::Degree: return "deg";
    case Unit::Volt: return "V";
    case Unit::Unitless: return "unitless";
  }
  return "unitless";
}

std::optional<Unit> parse_unit(std::string_view text) noexcept {
  if (text == "m") return Unit::Meter;
  if (text == "N") return Unit::Newton;
  if (text == "deg") return Unit::Degree;
  if (text == "V") return Unit::Volt;
  if (text == "unitless" || text.empty()) return Unit::Unitless;
  return std::nullopt;
}

std::optional<std::size_t> TimeSeriesTable::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t TimeSeriesTable::index_of(std::string_view name) const {
  if (auto idx = find(name)) return *idx;
  throw Error(ErrorCode::ChannelMissing, "channel '" + std::string(name) + "' not present");
}

std::vector<double> TimeSeriesTable::column(std::size_t col) const {
  if (col >= channels_.size()) {
    throw Error(ErrorCode::ChannelMissing, "column index out of range");
  }
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) out.push_back(row.at(col));
  return out;
}

bool TimeSeriesTable::has_missing() const noexcept {
  for (const auto& row : rows_) {
    for (double v : row) {
      if (is_missing(v)) return true;
    }
  }
  return false;
}

bool TimeSeriesTable::column_has_missing(std::size_t col) const noexcept {
  for (const auto& row : rows_) {
    if (col < row.size() && is_missing(row[col])) return true;
  }
  return false;
}

TimeSeriesTable TimeSeriesTable::with_column(std::size_t col, std::span<const double> values) const {
  if (col >= channels_.size() || values.size() != rows_.size()) {
    throw Error(ErrorCode::LengthMismatch, "replacement column does not fit table");
  }
  auto rows = rows_;
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].at(col) = values[i];
  return TimeSeriesTable(sample_rate_, start_time_, channels_, std::move(rows));
}

TimeSeriesTable TimeSeriesTable::select(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  std::vector<Channel> chans;
  for (const auto& n : names) {
    idx.push_back(index_of(n));
    chans.push_back(channels_[idx.back()]);
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(rows_.size());
  for (const auto& row : rows_) {
    std::vector<double> r;
    r.reserve(idx.size());
    for (auto i : idx) r.push_back(row.at(i));
    rows.push_back(std::move(r));
  }
  return TimeSeriesTable(sample_rate_, start_time_, std::move(chans), std::move(rows));
}

bool TimeSeriesTable::operator==(const TimeSeriesTable& other) const {
  if (sample_rate_ != other.sample_rate_ || start_time_ != other.start_time_ ||
      channels_ != other.channels_ || rows_.size() != other.rows_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& a = rows_[i];
    const auto& b = other.rows_[i];
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (is_missing(a[j]) != is_missing(b[j])) return false;
      if (!is_missing(a[j]) && a[j] != b[j]) return false;
    }
  }
  return true;
}

TimeSeriesTable table_from_columns(double sample_rate, double start_time,
                                   std::vector<Channel> channels,
                                   const std::vector<std::vector<double>>& columns) {
  if (columns.size() != channels.size()) {
    throw Error(ErrorCode::LengthMismatch, "column count differs from channel count");
  }
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) {
      throw Error(ErrorCode::LengthMismatch, "columns differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) rows[i][j] = columns[j][i];
  }
  return TimeSeriesTable(sample_rate, start_time, std::move(channels), std::move(rows));
}

std::vector<Violation> validate_table(const TimeSeriesTable& table) {
  std::vector<Violation> out;
  if (!(table.sample_rate() > 0.0) || !std::isfinite(table.sample_rate())) {
    out.push_back({"sample_rate", "sample rate must be a positive finite number"});
  }
  if (!std::isfinite(table.start_time())) {
    out.push_back({"start_time", "start time must be finite"});
  }
  std::set<std::string> seen;
  std::set<std::string> reported;
  for (const auto& ch : table.channels()) {
    if (!seen.insert(ch.name).second && reported.insert(ch.name).second) {
      out.push_back({ch.name, "duplicate channel name"});
    }
  }
  const auto width = table.channel_count();
  for (std::size_t i = 0; i < table.row_count(); ++i) {
    if (table.rows()[i].size() != width) {
      out.push_back({"row " + std::to_string(i),
                     "has " + std::to_string(table.rows()[i].size()) + " entries, expected " +
                         std::to_string(width)});
    }
  }
  return out;
}

double interpolate_at(const TimeSeriesTable& table, std::size_t col, double t) {
  const auto n = table.row_count();
  if (n == 0) throw Error(ErrorCode::TooFewSamples, "cannot interpolate an empty table");
  const double pos = (t - table.start_time()) * table.sample_rate();
  if (pos <= 0.0) return table.at(0, col);
  if (pos >= static_cast<double>(n - 1)) return table.at(n - 1, col);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  const double a = table.at(i, col);
  if (frac == 0.0) return a;
  const double b = table.at(i + 1, col);
  return a + frac * (b - a);
}

}  // namespace gaitkit
