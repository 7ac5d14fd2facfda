#include "gaitkit/formats/canonical_csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "text_util.hpp"

namespace gaitkit::formats {

namespace {

using detail::join;
using detail::parse_double;
using detail::split_fields;
using detail::split_lines;

constexpr double kTimeTolerance = 1e-6;

Unit kind_unit(CanonicalKind kind) {
  switch (kind) {
    case CanonicalKind::Motion: return Unit::Meter;
    case CanonicalKind::Grf: return Unit::Newton;
    case CanonicalKind::JointAngles: return Unit::Degree;
    default: return Unit::Unitless;
  }
}

bool is_table_kind(CanonicalKind kind) {
  return kind == CanonicalKind::Motion || kind == CanonicalKind::Grf ||
         kind == CanonicalKind::JointAngles;
}

/// Motion headers are triples <M>_x,<M>_y,<M>_z.
bool is_motion_header(const std::vector<std::string>& names) {
  if (names.size() % 3 != 0) return false;
  for (std::size_t i = 0; i < names.size(); i += 3) {
    const auto& n = names[i];
    if (n.size() < 3 || n.compare(n.size() - 2, 2, "_x") != 0) return false;
    const auto prefix = n.substr(0, n.size() - 2);
    if (names[i + 1] != prefix + "_y" || names[i + 2] != prefix + "_z") return false;
  }
  return true;
}

std::string header_text(const std::vector<std::string_view>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

void check_schema(CanonicalKind kind, const std::vector<std::string>& names,
                  const std::string& header) {
  if (kind == CanonicalKind::Motion) {
    if (!is_motion_header(names)) {
      throw Error(ErrorCode::SchemaMismatch,
                  "motion header must be time followed by <M>_x,<M>_y,<M>_z triples, got '" +
                      header + "'");
    }
    return;
  }
  if (names != schema_channels(kind)) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string(kind_name(kind)) + " header must be 'time," +
                    join(schema_channels(kind), ',') + "', got '" + header + "'");
  }
}

struct ParsedGrid {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
};

ParsedGrid parse_grid(std::string_view text, char sep) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::SchemaMismatch, "empty input, header expected");
  const auto head = split_fields(lines[0], sep);
  if (head.empty() || detail::trim(head[0]) != "time") {
    throw Error(ErrorCode::SchemaMismatch, "first column must be 'time'");
  }
  ParsedGrid grid;
  for (std::size_t i = 1; i < head.size(); ++i) grid.names.emplace_back(detail::trim(head[i]));
  const auto width = head.size();
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li], sep);
    if (fields.size() != width) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(li + 1) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(width));
    }
    auto t = parse_double(fields[0]);
    if (!t) {
      throw Error(ErrorCode::SchemaMismatch,
                  "line " + std::to_string(li + 1) + ": time '" + std::string(fields[0]) +
                      "' is not a number");
    }
    grid.times.push_back(*t);
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t j = 1; j < width; ++j) {
      if (detail::trim(fields[j]).empty()) {
        row.push_back(kMissing);
        continue;
      }
      auto v = parse_double(fields[j]);
      if (!v) {
        throw Error(ErrorCode::SchemaMismatch, "line " + std::to_string(li + 1) + ": field '" +
                                                   std::string(fields[j]) + "' is not a number");
      }
      row.push_back(*v);
    }
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

/// Sample rate from a time column: 1/median(dt), every dt checked against the
/// median, then refined over the whole span.
double infer_rate(const std::vector<double>& times) {
  if (times.size() < 2) {
    throw Error(ErrorCode::InsufficientRows,
                "at least two rows are needed to infer the sample rate");
  }
  std::vector<double> dt;
  dt.reserve(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double d = times[i] - times[i - 1];
    if (!(d > 0.0)) {
      throw Error(ErrorCode::NonMonotonicTime,
                  "time does not increase at row " + std::to_string(i + 1));
    }
    dt.push_back(d);
  }
  auto sorted = dt;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double median = sorted[sorted.size() / 2];
  if (sorted.size() % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + sorted.size() / 2);
    median = 0.5 * (median + lower);
  }
  for (std::size_t i = 0; i < dt.size(); ++i) {
    if (std::abs(dt[i] - median) > kTimeTolerance) {
      throw Error(ErrorCode::NonUniformTime,
                  "sampling interval at row " + std::to_string(i + 2) + " deviates from " +
                      format_real(median) + " s");
    }
  }
  return static_cast<double>(times.size() - 1) / (times.back() - times.front());
}

TimeSeriesTable grid_to_table(ParsedGrid grid, const std::vector<Unit>& units) {
  const double rate = infer_rate(grid.times);
  std::vector<Channel> channels;
  for (std::size_t i = 0; i < grid.names.size(); ++i) channels.push_back({grid.names[i], units[i]});
  return TimeSeriesTable(rate, grid.times.front(), std::move(channels), std::move(grid.rows));
}

std::string table_body(const TimeSeriesTable& table) {
  std::string out = "time";
  for (const auto& ch : table.channels()) {
    out.push_back(',');
    out += ch.name;
  }
  out.push_back('\n');
  for (std::size_t i = 0; i < table.row_count(); ++i) {
    out += format_real(table.time(i));
    for (double v : table.rows()[i]) {
      out.push_back(',');
      if (!is_missing(v)) out += format_real(v);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace

std::string format_real(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::string_view kind_name(CanonicalKind kind) noexcept {
  switch (kind) {
    case CanonicalKind::Motion: return "motion";
    case CanonicalKind::Grf: return "grf";
    case CanonicalKind::JointAngles: return "joint_angles";
    case CanonicalKind::Events: return "events";
    case CanonicalKind::Spatiotemporal: return "spatiotemporal";
  }
  return "";
}

std::optional<CanonicalKind> parse_kind(std::string_view text) noexcept {
  for (auto k : kAllKinds) {
    if (kind_name(k) == text) return k;
  }
  return std::nullopt;
}

std::string file_name(CanonicalKind kind) { return std::string(kind_name(kind)) + ".csv"; }

const std::vector<std::string>& schema_channels(CanonicalKind kind) {
  static const std::vector<std::string> kGrf{"fx_l", "fy_l", "fz_l", "fx_r", "fy_r", "fz_r"};
  static const std::vector<std::string> kAngles{"trunk",   "thigh_l", "thigh_r",
                                                "shank_l", "shank_r", "foot_l",
                                                "foot_r",  "knee_l",  "knee_r"};
  static const std::vector<std::string> kNone;
  switch (kind) {
    case CanonicalKind::Grf: return kGrf;
    case CanonicalKind::JointAngles: return kAngles;
    default: return kNone;
  }
}

std::optional<CanonicalKind> detect_table_kind(std::string_view header_line) {
  auto fields = split_fields(header_line, ',');
  if (fields.empty() || fields[0] != "time") return std::nullopt;
  std::vector<std::string> names(fields.begin() + 1, fields.end());
  if (names == schema_channels(CanonicalKind::Grf)) return CanonicalKind::Grf;
  if (names == schema_channels(CanonicalKind::JointAngles)) return CanonicalKind::JointAngles;
  if (!names.empty() && is_motion_header(names)) return CanonicalKind::Motion;
  return std::nullopt;
}

TimeSeriesTable read_table_csv(std::string_view text, CanonicalKind kind) {
  if (!is_table_kind(kind)) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string(kind_name(kind)) + " is not a time-series kind");
  }
  const auto lines = split_lines(text);
  auto grid = parse_grid(text, ',');
  check_schema(kind, grid.names, lines.empty() ? std::string() : std::string(lines[0]));
  std::vector<Unit> units(grid.names.size(), kind_unit(kind));
  return grid_to_table(std::move(grid), units);
}

GaitEvents read_events_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "foot,event,time") {
    throw Error(ErrorCode::SchemaMismatch, "events header must be 'foot,event,time'");
  }
  std::vector<GaitEvent> events;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_fields(lines[li], ',');
    if (f.size() != 3) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(li + 1) + " has " +
                                            std::to_string(f.size()) + " fields, expected 3");
    }
    auto foot = parse_side(f[0]);
    auto kind = parse_event_kind(f[1]);
    auto t = parse_double(f[2]);
    if ((f[0] != "left" && f[0] != "right") || !foot || !kind || !t) {
      throw Error(ErrorCode::SchemaMismatch,
                  "line " + std::to_string(li + 1) + ": '" + std::string(lines[li]) +
                      "' is not <left|right>,<touchdown|toeoff>,<time>");
    }
    if (!events.empty() && *t < events.back().time) {
      throw Error(ErrorCode::NonMonotonicTime,
                  "events not sorted by time at line " + std::to_string(li + 1));
    }
    events.push_back({*foot, *kind, *t});
  }
  auto problems = event_violations(events);
  if (!problems.empty()) throw Error(ErrorCode::SchemaMismatch, problems.front());
  return GaitEvents(std::move(events));
}

SpatiotemporalRow read_spatiotemporal_csv(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<std::string_view> expected;
  for (const auto& f : SpatiotemporalRow::fields()) expected.push_back(f.name);
  const auto want = header_text(expected);
  if (lines.empty() || lines[0] != want) {
    throw Error(ErrorCode::SchemaMismatch, "spatiotemporal header must be '" + want + "'");
  }
  if (lines.size() != 2) {
    throw Error(ErrorCode::SchemaMismatch, "spatiotemporal file must hold exactly one data row");
  }
  const auto f = split_fields(lines[1], ',');
  if (f.size() != expected.size()) {
    throw Error(ErrorCode::RaggedRow, "spatiotemporal row has " + std::to_string(f.size()) +
                                          " fields, expected " + std::to_string(expected.size()));
  }
  SpatiotemporalRow row;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (detail::trim(f[i]).empty()) continue;
    auto v = parse_double(f[i]);
    if (!v) {
      throw Error(ErrorCode::SchemaMismatch,
                  "field " + std::string(expected[i]) + " is not a number");
    }
    row.*(SpatiotemporalRow::fields()[i].member) = *v;
  }
  return row;
}

CanonicalData read_canonical_csv(std::string_view text, CanonicalKind kind) {
  switch (kind) {
    case CanonicalKind::Events: return read_events_csv(text);
    case CanonicalKind::Spatiotemporal: return read_spatiotemporal_csv(text);
    default: return read_table_csv(text, kind);
  }
}

std::string write_table_csv(const TimeSeriesTable& table, CanonicalKind kind) {
  if (!is_table_kind(kind)) {
    throw Error(ErrorCode::SchemaMismatch,
                std::string(kind_name(kind)) + " is not a time-series kind");
  }
  std::vector<std::string> names;
  for (const auto& ch : table.channels()) names.push_back(ch.name);
  check_schema(kind, names, "time," + join(names, ','));
  return table_body(table);
}

std::string write_events_csv(const GaitEvents& events) {
  std::string out = "foot,event,time\n";
  for (const auto& e : events.events()) {
    out += side_name(e.foot);
    out.push_back(',');
    out += event_kind_name(e.kind);
    out.push_back(',');
    out += format_real(e.time);
    out.push_back('\n');
  }
  return out;
}

std::string write_spatiotemporal_csv(const SpatiotemporalRow& row) {
  std::string header;
  std::string values;
  bool first = true;
  for (const auto& f : SpatiotemporalRow::fields()) {
    if (!first) {
      header.push_back(',');
      values.push_back(',');
    }
    first = false;
    header += f.name;
    const auto& v = row.*(f.member);
    if (v && !is_missing(*v)) values += format_real(*v);
  }
  return header + "\n" + values + "\n";
}

std::string write_canonical_csv(const CanonicalData& data, CanonicalKind kind) {
  switch (kind) {
    case CanonicalKind::Events:
      if (auto p = std::get_if<GaitEvents>(&data)) return write_events_csv(*p);
      break;
    case CanonicalKind::Spatiotemporal:
      if (auto p = std::get_if<SpatiotemporalRow>(&data)) return write_spatiotemporal_csv(*p);
      break;
    default:
      if (auto p = std::get_if<TimeSeriesTable>(&data)) return write_table_csv(*p, kind);
      break;
  }
  throw Error(ErrorCode::SchemaMismatch,
              "data does not match kind " + std::string(kind_name(kind)));
}

TimeSeriesTable read_delimited(std::string_view text, char separator, Warnings* warnings) {
  auto grid = parse_grid(text, separator);
  std::vector<std::string> names = grid.names;
  Unit unit = Unit::Unitless;
  if (names == schema_channels(CanonicalKind::Grf)) {
    unit = Unit::Newton;
  } else if (names == schema_channels(CanonicalKind::JointAngles)) {
    unit = Unit::Degree;
  } else if (!names.empty() && is_motion_header(names)) {
    unit = Unit::Meter;
  } else {
    warn(warnings, "header not recognised as a canonical kind; channels imported as unitless");
  }
  std::vector<Unit> units(names.size(), unit);
  return grid_to_table(std::move(grid), units);
}

std::string write_delimited(const TimeSeriesTable& table) { return table_body(table); }

}  // namespace gaitkit::formats
