#include "gaitkit/formats/trc.hpp"

#include <cmath>
#include <map>
#include <string>

#include "text_util.hpp"

namespace gaitkit::formats {

namespace {

using detail::parse_double;
using detail::split_fields;
using detail::trim;

constexpr double kTimeTolerance = 1e-6;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::HeaderMalformed, "TRC header: " + what);
}

}  // namespace

TimeSeriesTable parse_trc(std::string_view text, Warnings* warnings) {
  const auto lines = detail::split_lines(text);
  if (lines.size() < 6) malformed("expected at least 6 lines, got " + std::to_string(lines.size()));
  if (trim(lines[0]).rfind("PathFileType", 0) != 0) malformed("line 1 must start with PathFileType");

  const auto keys = split_fields(lines[1], '\t');
  const auto values = split_fields(lines[2], '\t');
  std::map<std::string, std::string> header;
  for (std::size_t i = 0; i < keys.size() && i < values.size(); ++i) {
    header[std::string(trim(keys[i]))] = std::string(trim(values[i]));
  }
  auto numeric = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end()) malformed(std::string("missing ") + key);
    auto v = parse_double(it->second);
    if (!v) malformed(std::string(key) + " value '" + it->second + "' is not a number");
    return *v;
  };
  const double rate = numeric("DataRate");
  const double declared_markers = numeric("NumMarkers");
  if (!(rate > 0.0)) malformed("DataRate must be positive");
  if (declared_markers < 0 || declared_markers != std::floor(declared_markers) ||
      declared_markers > 1e6) {
    malformed("NumMarkers must be a non-negative integer");
  }
  const auto n_declared = static_cast<std::size_t>(declared_markers);
  const std::string units = header.count("Units") ? header["Units"] : std::string();

  double to_meters = 1.0;
  Unit unit = Unit::Meter;
  if (units == "mm") {
    to_meters = 0.001;
  } else if (units == "cm") {
    to_meters = 0.01;
  } else if (units != "m") {
    unit = Unit::Unitless;
    warn(warnings, "TRC units '" + units + "' not recognised; values imported as unitless");
  }

  const auto name_fields = split_fields(lines[3], '\t');
  if (name_fields.size() < 2 || trim(name_fields[0]) != "Frame#") {
    malformed("line 4 must start with Frame#");
  }
  std::vector<std::string> markers;
  for (std::size_t i = 2; i < name_fields.size(); ++i) {
    auto n = trim(name_fields[i]);
    if (!n.empty()) markers.emplace_back(n);
  }
  std::size_t coord_labels = 0;
  for (auto f : split_fields(lines[4], '\t')) {
    if (!trim(f).empty()) ++coord_labels;
  }
  if (coord_labels % 3 != 0 || coord_labels / 3 != n_declared || markers.size() != n_declared) {
    throw Error(ErrorCode::MarkerCountMismatch,
                "NumMarkers=" + std::to_string(n_declared) + " but header lists " +
                    std::to_string(markers.size()) + " marker names and " +
                    std::to_string(coord_labels) + " coordinate columns");
  }

  std::vector<Channel> channels;
  for (const auto& m : markers) {
    for (const char* axis : {"_x", "_y", "_z"}) channels.push_back({m + axis, unit});
  }

  const std::size_t width = 2 + 3 * n_declared;
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  for (std::size_t li = 5; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    auto fields = split_fields(lines[li], '\t');
    while (fields.size() > width && trim(fields.back()).empty()) fields.pop_back();
    if (fields.size() > width || fields.size() < 2) {
      throw Error(ErrorCode::RaggedRow, "TRC line " + std::to_string(li + 1) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(width));
    }
    auto t = parse_double(fields[1]);
    if (!t) {
      throw Error(ErrorCode::HeaderMalformed,
                  "TRC line " + std::to_string(li + 1) + ": time is not a number");
    }
    std::vector<double> row(3 * n_declared, kMissing);
    for (std::size_t j = 2; j < fields.size(); ++j) {
      if (trim(fields[j]).empty()) continue;
      auto v = parse_double(fields[j]);
      if (!v) {
        throw Error(ErrorCode::RaggedRow, "TRC line " + std::to_string(li + 1) + ": '" +
                                              std::string(fields[j]) + "' is not a number");
      }
      row[j - 2] = *v * to_meters;
    }
    if (!times.empty() && std::abs((*t - times.back()) - 1.0 / rate) > kTimeTolerance) {
      throw Error(ErrorCode::NonUniformTime, "TRC frame at line " + std::to_string(li + 1) +
                                                 " deviates from 1/DataRate spacing");
    }
    times.push_back(*t);
    rows.push_back(std::move(row));
  }
  if (header.count("NumFrames")) {
    auto nf = parse_double(header["NumFrames"]);
    if (nf && *nf != static_cast<double>(rows.size())) {
      warn(warnings, "NumFrames=" + header["NumFrames"] + " but file holds " +
                         std::to_string(rows.size()) + " frames");
    }
  }
  return TimeSeriesTable(rate, times.empty() ? 0.0 : times.front(), std::move(channels),
                         std::move(rows));
}

}  // namespace gaitkit::formats
