#include "gaitkit/core/model.hpp"

#include <algorithm>

#include "json.hpp"

#include "gaitkit/core/error.hpp"

namespace gaitkit {

std::string_view side_name(Side s) noexcept { return s == Side::Left ? "left" : "right"; }
std::string_view side_suffix(Side s) noexcept { return s == Side::Left ? "l" : "r"; }

std::optional<Side> parse_side(std::string_view text) noexcept {
  if (text == "left" || text == "l") return Side::Left;
  if (text == "right" || text == "r") return Side::Right;
  return std::nullopt;
}

std::string_view event_kind_name(EventKind k) noexcept {
  return k == EventKind::Touchdown ? "touchdown" : "toeoff";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  if (text == "touchdown") return EventKind::Touchdown;
  if (text == "toeoff") return EventKind::Toeoff;
  return std::nullopt;
}

std::vector<std::string> event_violations(const std::vector<GaitEvent>& events) {
  std::vector<std::string> out;
  std::optional<EventKind> last[2];
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!std::isfinite(e.time) || e.time < 0.0) {
      out.push_back("event " + std::to_string(i) + " has negative or non-finite time");
    }
    if (i > 0 && e.time < events[i - 1].time) {
      out.push_back("event " + std::to_string(i) + " is out of time order");
    }
    auto& prev = last[e.foot == Side::Left ? 0 : 1];
    const EventKind expected =
        !prev ? EventKind::Touchdown
              : (*prev == EventKind::Touchdown ? EventKind::Toeoff : EventKind::Touchdown);
    if (e.kind != expected) {
      out.push_back("event " + std::to_string(i) + " (" + std::string(side_name(e.foot)) + " " +
                    std::string(event_kind_name(e.kind)) + ") breaks touchdown/toe-off alternation");
    }
    prev = e.kind;
  }
  return out;
}

GaitEvents::GaitEvents(std::vector<GaitEvent> events) : events_(std::move(events)) {
  auto problems = event_violations(events_);
  if (!problems.empty()) throw Error(ErrorCode::InvalidArgument, problems.front());
}

std::vector<double> GaitEvents::times(Side foot, EventKind kind) const {
  std::vector<double> out;
  for (const auto& e : events_) {
    if (e.foot == foot && e.kind == kind) out.push_back(e.time);
  }
  return out;
}

GaitEvents make_events(std::vector<GaitEvent> events) {
  std::stable_sort(events.begin(), events.end(), [](const GaitEvent& a, const GaitEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.foot == Side::Left && b.foot == Side::Right;
  });
  return GaitEvents(std::move(events));
}

std::size_t cycle_count(const GaitEvents& ev, Side side) {
  const auto td = ev.touchdowns(side);
  return td.size() < 2 ? 0 : td.size() - 1;
}

CycleWindow cycle_window(const GaitEvents& ev, Side side, std::size_t cycle_index) {
  const auto td = ev.touchdowns(side);
  if (td.size() < 2 || cycle_index >= td.size() - 1) {
    throw Error(ErrorCode::CycleOutOfRange,
                "cycle " + std::to_string(cycle_index) + " of " + std::string(side_name(side)) +
                    " foot not available (" + std::to_string(td.size() < 2 ? 0 : td.size() - 1) +
                    " complete cycles)");
  }
  return {td[cycle_index], td[cycle_index + 1]};
}

const std::array<SpatiotemporalRow::Field, 12>& SpatiotemporalRow::fields() {
  using R = SpatiotemporalRow;
  static const std::array<Field, 12> kFields{{
      {"step_length_l", &R::step_length_l},
      {"step_length_r", &R::step_length_r},
      {"stride_length", &R::stride_length},
      {"step_width", &R::step_width},
      {"gait_speed", &R::gait_speed},
      {"cadence", &R::cadence},
      {"stance_time_l", &R::stance_time_l},
      {"stance_time_r", &R::stance_time_r},
      {"swing_time_l", &R::swing_time_l},
      {"swing_time_r", &R::swing_time_r},
      {"gait_time", &R::gait_time},
      {"double_support_time", &R::double_support_time},
  }};
  return kFields;
}

bool is_valid_component(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto ok_first = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!ok_first(name.front())) return false;
  return std::all_of(name.begin() + 1, name.end(),
                     [&](char c) { return ok_first(c) || c == '_' || c == '-'; });
}

TrialRef TrialRef::make(std::string group, std::string patient_id, std::string trial_id) {
  for (const auto* part : {&group, &patient_id, &trial_id}) {
    if (!is_valid_component(*part)) {
      throw Error(ErrorCode::PathInvalid,
                  "'" + *part + "' does not match [a-z0-9][a-z0-9_-]*");
    }
  }
  return TrialRef{std::move(group), std::move(patient_id), std::move(trial_id)};
}

TrialRef TrialRef::parse(std::string_view slashed) {
  const auto a = slashed.find('/');
  const auto b = a == std::string_view::npos ? a : slashed.find('/', a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos ||
      slashed.find('/', b + 1) != std::string_view::npos) {
    throw Error(ErrorCode::PathInvalid,
                "trial reference '" + std::string(slashed) + "' is not group/patient/trial");
  }
  return make(std::string(slashed.substr(0, a)), std::string(slashed.substr(a + 1, b - a - 1)),
              std::string(slashed.substr(b + 1)));
}

std::string_view role_name(MarkerRole r) noexcept {
  switch (r) {
    case MarkerRole::Shoulder: return "SHO";
    case MarkerRole::Hip: return "HIP";
    case MarkerRole::Knee: return "KNE";
    case MarkerRole::Ankle: return "ANK";
    case MarkerRole::Heel: return "HEE";
    case MarkerRole::Toe: return "TOE";
  }
  return "";
}

void MarkerSet::set(MarkerRole role, Side side, std::string prefix) {
  prefixes_[{role, side == Side::Left ? 0 : 1}] = std::move(prefix);
}

void MarkerSet::set_central(MarkerRole role, std::string prefix) {
  prefixes_[{role, 2}] = std::move(prefix);
}

std::optional<std::string> MarkerSet::prefix(MarkerRole role, Side side) const {
  auto it = prefixes_.find({role, side == Side::Left ? 0 : 1});
  if (it == prefixes_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> MarkerSet::central(MarkerRole role) const {
  auto it = prefixes_.find({role, 2});
  if (it == prefixes_.end()) return std::nullopt;
  return it->second;
}

MarkerSet MarkerSet::standard() {
  MarkerSet m;
  for (auto role : {MarkerRole::Shoulder, MarkerRole::Hip, MarkerRole::Knee, MarkerRole::Ankle,
                    MarkerRole::Heel, MarkerRole::Toe}) {
    m.set(role, Side::Left, std::string(role_name(role)) + "_L");
    m.set(role, Side::Right, std::string(role_name(role)) + "_R");
  }
  return m;
}

MarkerSet MarkerSet::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("marker set is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaMismatch, "marker set must be a JSON object");
  MarkerSet m;
  for (auto& [key, value] : doc.items()) {
    if (!value.is_string()) {
      throw Error(ErrorCode::SchemaMismatch, "marker set entry '" + key + "' must be a string");
    }
    bool matched = false;
    for (auto role : {MarkerRole::Shoulder, MarkerRole::Hip, MarkerRole::Knee, MarkerRole::Ankle,
                      MarkerRole::Heel, MarkerRole::Toe}) {
      const std::string base(role_name(role));
      if (key == base) {
        if (role != MarkerRole::Shoulder && role != MarkerRole::Hip) {
          throw Error(ErrorCode::SchemaMismatch, "only SHO and HIP may be side-free");
        }
        m.set_central(role, value.get<std::string>());
        matched = true;
      } else if (key == base + "_L") {
        m.set(role, Side::Left, value.get<std::string>());
        matched = true;
      } else if (key == base + "_R") {
        m.set(role, Side::Right, value.get<std::string>());
        matched = true;
      }
    }
    if (!matched) throw Error(ErrorCode::SchemaMismatch, "unknown marker role '" + key + "'");
  }
  return m;
}

MarkerColumns resolve_marker(const TimeSeriesTable& motion, const std::string& prefix) {
  auto x = motion.find(prefix + "_x");
  auto y = motion.find(prefix + "_y");
  auto z = motion.find(prefix + "_z");
  if (!x || !y || !z) {
    throw Error(ErrorCode::MarkerMissing, "marker '" + prefix + "' lacks _x/_y/_z channels");
  }
  return {*x, *y, *z};
}

}  // namespace gaitkit
