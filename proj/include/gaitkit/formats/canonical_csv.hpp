#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gaitkit/core/error.hpp"
#include "gaitkit/core/model.hpp"
#include "gaitkit/core/table.hpp"

namespace gaitkit::formats {

enum class CanonicalKind { Motion, Grf, JointAngles, Events, Spatiotemporal };

inline constexpr CanonicalKind kAllKinds[] = {CanonicalKind::Motion, CanonicalKind::Grf,
                                              CanonicalKind::JointAngles, CanonicalKind::Events,
                                              CanonicalKind::Spatiotemporal};

std::string_view kind_name(CanonicalKind kind) noexcept;  // "motion", "grf", ...
std::optional<CanonicalKind> parse_kind(std::string_view text) noexcept;
std::string file_name(CanonicalKind kind);  // "grf.csv", ...

/// Fixed value channels (time excluded) for grf and joint_angles.
const std::vector<std::string>& schema_channels(CanonicalKind kind);

using CanonicalData = std::variant<TimeSeriesTable, GaitEvents, SpatiotemporalRow>;

CanonicalData read_canonical_csv(std::string_view text, CanonicalKind kind);
std::string write_canonical_csv(const CanonicalData& data, CanonicalKind kind);

TimeSeriesTable read_table_csv(std::string_view text, CanonicalKind kind);
GaitEvents read_events_csv(std::string_view text);
SpatiotemporalRow read_spatiotemporal_csv(std::string_view text);

/// Throws SchemaMismatch if the table's channels do not fit the kind's header.
std::string write_table_csv(const TimeSeriesTable& table, CanonicalKind kind);
std::string write_events_csv(const GaitEvents& events);
std::string write_spatiotemporal_csv(const SpatiotemporalRow& row);

/// Time-series kind whose header matches `header_line`, if any.
std::optional<CanonicalKind> detect_table_kind(std::string_view header_line);

/// Delimited text with a `time` first column and arbitrary channel names
/// (the TXT path). Units are taken from a recognised canonical header,
/// otherwise `unitless`.
TimeSeriesTable read_delimited(std::string_view text, char separator = ',',
                               Warnings* warnings = nullptr);
/// Comma-separated, `time` first, no schema check.
std::string write_delimited(const TimeSeriesTable& table);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

}  // namespace gaitkit::formats
