#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaitkit/core/table.hpp"

namespace gaitkit {

enum class Side { Left, Right };

std::string_view side_name(Side s) noexcept;        // "left" / "right"
std::string_view side_suffix(Side s) noexcept;      // "l" / "r"
std::optional<Side> parse_side(std::string_view text) noexcept;

// ---------------------------------------------------------------------------
// Gait events

enum class EventKind { Touchdown, Toeoff };

std::string_view event_kind_name(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

struct GaitEvent {
  Side foot = Side::Left;
  EventKind kind = EventKind::Touchdown;
  double time = 0.0;

  bool operator==(const GaitEvent&) const = default;
};

/// Time-ordered touchdown/toe-off list. Per foot the kinds alternate and the
/// first event is a touchdown; the constructor enforces this.
class GaitEvents {
 public:
  GaitEvents() = default;
  explicit GaitEvents(std::vector<GaitEvent> events);

  const std::vector<GaitEvent>& events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }
  std::size_t size() const noexcept { return events_.size(); }

  std::vector<double> times(Side foot, EventKind kind) const;
  std::vector<double> touchdowns(Side foot) const { return times(foot, EventKind::Touchdown); }

  bool operator==(const GaitEvents&) const = default;

 private:
  std::vector<GaitEvent> events_;
};

/// Describes why a raw event list breaks the GaitEvents invariants (empty if valid).
std::vector<std::string> event_violations(const std::vector<GaitEvent>& events);

/// Sorts by time (stable, left before right on ties) and builds GaitEvents.
GaitEvents make_events(std::vector<GaitEvent> events);

/// Interval between consecutive ipsilateral touchdowns.
struct CycleWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// The cycle_index-th complete touchdown-to-touchdown interval of one foot;
/// throws CycleOutOfRange.
CycleWindow cycle_window(const GaitEvents& ev, Side side, std::size_t cycle_index);
std::size_t cycle_count(const GaitEvents& ev, Side side);

// ---------------------------------------------------------------------------
// Spatiotemporal parameters

struct SpatiotemporalRow {
  std::optional<double> step_length_l, step_length_r, stride_length, step_width;
  std::optional<double> gait_speed, cadence;
  std::optional<double> stance_time_l, stance_time_r, swing_time_l, swing_time_r;
  std::optional<double> gait_time, double_support_time;

  struct Field {
    std::string_view name;
    std::optional<double> SpatiotemporalRow::*member;
  };
  /// Field order of the canonical spatiotemporal CSV header.
  static const std::array<Field, 12>& fields();

  bool operator==(const SpatiotemporalRow&) const = default;
};

// ---------------------------------------------------------------------------
// Trial addressing

/// group -> patient -> trial address. Each component matches [a-z0-9][a-z0-9_-]*.
struct TrialRef {
  std::string group;
  std::string patient_id;
  std::string trial_id;

  /// Throws PathInvalid when a component breaks the naming pattern.
  static TrialRef make(std::string group, std::string patient_id, std::string trial_id);
  /// Parses "group/patient/trial".
  static TrialRef parse(std::string_view slashed);

  std::string to_string() const { return group + "/" + patient_id + "/" + trial_id; }

  auto operator<=>(const TrialRef&) const = default;
  bool operator==(const TrialRef&) const = default;
};

bool is_valid_component(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Marker set

enum class MarkerRole { Shoulder, Hip, Knee, Ankle, Heel, Toe };

std::string_view role_name(MarkerRole r) noexcept;  // SHO, HIP, KNE, ANK, HEE, TOE

/// Maps anatomical roles onto channel prefixes of a motion table. A prefix P
/// resolves to the channels P_x, P_y, P_z. Coordinates: x anterior, y left,
/// z up, meters. Shoulder and hip may also be given side-free (e.g. a single
/// C7 or sacrum marker).
class MarkerSet {
 public:
  void set(MarkerRole role, Side side, std::string prefix);
  void set_central(MarkerRole role, std::string prefix);

  std::optional<std::string> prefix(MarkerRole role, Side side) const;
  std::optional<std::string> central(MarkerRole role) const;

  /// Default naming: <ROLE>_<L|R>, e.g. HEE_L.
  static MarkerSet standard();
  /// JSON object {"HEE_L": "LHEE", ..., "SHO": "C7"}.
  static MarkerSet from_json(std::string_view text);

 private:
  std::map<std::pair<MarkerRole, int>, std::string> prefixes_;  // side index 0/1, 2 = central
};

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

/// Column indices of the three coordinates of one marker.
struct MarkerColumns {
  std::size_t x = 0, y = 0, z = 0;
};

/// Throws MarkerMissing unless all three coordinate channels exist.
MarkerColumns resolve_marker(const TimeSeriesTable& motion, const std::string& prefix);

// ---------------------------------------------------------------------------
// Cycle-normalized curves

inline constexpr std::size_t kDefaultCyclePoints = 101;

struct NormalizedCurve {
  std::vector<double> values;
  TrialRef source;
  std::string variable;
  Side side = Side::Left;
  std::size_t cycle_index = 0;
};

}  // namespace gaitkit
