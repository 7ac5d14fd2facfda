#include "gaitkit/service/api.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <mutex>

#include "gaitkit/features/normalize.hpp"
#include "gaitkit/features/spatiotemporal.hpp"

namespace gaitkit::service {

namespace {

using formats::CanonicalKind;
using nlohmann::json;

constexpr std::size_t kMaxPoints = 10000;
constexpr std::size_t kMaxCacheEntries = 4096;

[[noreturn]] void bad_request(const std::string& detail) { throw Error(ErrorCode::BadRequest, detail); }

TrialRef ref_from_json(const json& v) {
  try {
    if (v.is_string()) return TrialRef::parse(v.get<std::string>());
    if (v.is_object()) {
      return TrialRef::make(v.at("group").get<std::string>(), v.at("patient_id").get<std::string>(),
                            v.at("trial_id").get<std::string>());
    }
  } catch (const json::exception& e) {
    bad_request(std::string("trial reference: ") + e.what());
  } catch (const Error& e) {
    bad_request(e.what());
  }
  bad_request("trial reference must be \"group/patient/trial\" or an object");
}

std::vector<TrialRef> refs_from_json(const json& body, const char* key, bool required) {
  if (!body.contains(key) || body[key].is_null()) {
    if (required) bad_request(std::string("'") + key + "' is required");
    return {};
  }
  if (!body[key].is_array()) bad_request(std::string("'") + key + "' must be an array");
  std::vector<TrialRef> out;
  for (const auto& v : body[key]) out.push_back(ref_from_json(v));
  if (required && out.empty()) bad_request(std::string("'") + key + "' must not be empty");
  return out;
}

Side side_from_text(const std::string& text) {
  auto s = parse_side(text);
  if (!s) bad_request("side must be 'left' or 'right', got '" + text + "'");
  return *s;
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    bad_request(std::string("request body is not valid JSON: ") + e.what());
  }
}

json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

// "<kind>.<channel>" -> table kind and the side-resolved channel name.
std::pair<CanonicalKind, std::string> resolve_variable(const std::string& variable, Side side,
                                                      const TimeSeriesTable* table) {
  const auto dot = variable.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == variable.size()) {
    bad_request("variable must look like <kind>.<channel>, got '" + variable + "'");
  }
  const auto kind = formats::parse_kind(variable.substr(0, dot));
  if (!kind || *kind == CanonicalKind::Events || *kind == CanonicalKind::Spatiotemporal) {
    bad_request("variable kind must be motion, grf or joint_angles");
  }
  const std::string base = variable.substr(dot + 1);
  const std::string sided = base + "_" + std::string(side_suffix(side));
  if (table == nullptr || table->find(sided)) return {*kind, sided};
  return {*kind, base};
}

std::string read_range(const fs::path& path, std::uint64_t offset, std::uint64_t length) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.filename().string());
  in.seekg(static_cast<std::streamoff>(offset));
  std::string data(length, '\0');
  in.read(data.data(), static_cast<std::streamsize>(length));
  if (static_cast<std::uint64_t>(in.gcount()) != length) {
    throw Error(ErrorCode::IoFailure, "short read on " + path.filename().string());
  }
  return data;
}

Response json_response(const json& j) {
  Response r;
  r.body = j.dump();
  return r;
}

template <typename F>
Response guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return error_response(Error(ErrorCode::IoFailure, e.what()));
  }
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::NoVideo: return 404;
    case ErrorCode::RangeNotSatisfiable: return 416;
    case ErrorCode::BadRequest:
    case ErrorCode::PathInvalid:
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::IoFailure:
    case ErrorCode::CorruptFile: return 500;
    default: return 422;
  }
}

Response error_response(const Error& e) {
  Response r;
  r.status = http_status(e.code());
  r.body = json{{"error", std::string(code_name(e.code()))}, {"detail", e.what()}}.dump();
  return r;
}

CycleSelection parse_cycle(const json& value) {
  CycleSelection c;
  if (value.is_null()) return c;
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "first") return c;
    if (s == "all") {
      c.mode = CycleSelection::Mode::All;
      return c;
    }
    if (auto n = parse_u64(s)) {
      c.mode = CycleSelection::Mode::Index;
      c.index = static_cast<std::size_t>(*n);
      return c;
    }
  } else if (value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    c.mode = CycleSelection::Mode::Index;
    c.index = value.get<std::size_t>();
    return c;
  }
  bad_request("cycle must be 'first', 'all' or a non-negative index");
}

EnsembleRequest parse_ensemble_request(const json& body) {
  if (!body.is_object()) bad_request("request body must be a JSON object");
  EnsembleRequest req;
  req.trials_a = refs_from_json(body, "trials_a", true);
  req.trials_b = refs_from_json(body, "trials_b", false);
  if (!body.contains("variable") || !body["variable"].is_string()) bad_request("'variable' string is required");
  req.variable = body["variable"].get<std::string>();
  if (body.contains("side")) {
    if (!body["side"].is_string()) bad_request("'side' must be a string");
    req.side = side_from_text(body["side"].get<std::string>());
  }
  if (body.contains("cycle")) req.cycle = parse_cycle(body["cycle"]);
  if (body.contains("points")) {
    const auto& p = body["points"];
    if (!p.is_number_integer() || p.get<std::int64_t>() < 2 || p.get<std::int64_t>() > static_cast<std::int64_t>(kMaxPoints)) {
      bad_request("'points' must be an integer in [2, " + std::to_string(kMaxPoints) + "]");
    }
    req.points = p.get<std::size_t>();
  }
  if (body.contains("alpha")) {
    const auto& a = body["alpha"];
    if (!a.is_number() || !(a.get<double>() > 0.0 && a.get<double>() < 1.0)) {
      bad_request("'alpha' must be a number in (0, 1)");
    }
    req.alpha = a.get<double>();
  }
  return req;
}

json to_json(const stats::EnsembleSummary& s) {
  json curves = json::array();
  for (const auto& c : s.per_trial) {
    curves.push_back({{"ref", c.source.to_string()}, {"cycle", c.cycle_index}, {"values", c.values}});
  }
  return {{"n", s.n},          {"alpha", s.alpha},     {"mean", s.mean},
          {"ci_low", s.ci_low}, {"ci_high", s.ci_high}, {"per_trial", curves}};
}

json to_json(const EnsemblePayload& p) {
  return {{"channel", p.channel},
          {"group_a", to_json(p.group_a)},
          {"group_b", p.group_b ? to_json(*p.group_b) : json(nullptr)}};
}

json to_json(const stats::BoxStats& b) {
  json outliers = json::array();
  for (const auto& [ref, v] : b.outliers) outliers.push_back({{"ref", ref.to_string()}, {"value", v}});
  return {{"min", b.min},
          {"q1", b.q1},
          {"median", b.median},
          {"q3", b.q3},
          {"max", b.max},
          {"whisker_low", b.whisker_low},
          {"whisker_high", b.whisker_high},
          {"n", b.n},
          {"outliers", outliers}};
}

json to_json(const SpatiotemporalRow& row) {
  json j = json::object();
  for (const auto& f : SpatiotemporalRow::fields()) j[std::string(f.name)] = optional_number(row.*f.member);
  return j;
}

json to_json(const SpatiotemporalPayload& p) {
  json box = json::object();
  for (const auto& [name, dual] : p.box) {
    box[name] = {{"a", dual.a ? to_json(*dual.a) : json(nullptr)},
                 {"b", dual.b ? to_json(*dual.b) : json(nullptr)}};
  }
  json axes = json::array();
  for (const auto& a : p.radar.axes) {
    axes.push_back({{"parameter", a.parameter},
                    {"mean_a", optional_number(a.mean_a)},
                    {"mean_b", optional_number(a.mean_b)},
                    {"axis_min", a.axis_min},
                    {"axis_max", a.axis_max},
                    {"normalized_a", optional_number(a.normalized_a)},
                    {"normalized_b", optional_number(a.normalized_b)}});
  }
  json per_trial = json::object();
  for (const auto& [ref, row] : p.per_trial) per_trial[ref.to_string()] = to_json(row);
  return {{"box", box}, {"radar", {{"axes", axes}}}, {"per_trial", per_trial}};
}

RangeDecision decide_range(const std::optional<std::string>& header, std::uint64_t size) {
  RangeDecision full{RangeDecision::Kind::Full, 0, size == 0 ? 0 : size - 1};
  if (!header) return full;
  RangeDecision unsatisfiable{RangeDecision::Kind::Unsatisfiable, 0, 0};
  std::string_view h(*header);
  while (!h.empty() && std::isspace(static_cast<unsigned char>(h.front()))) h.remove_prefix(1);
  while (!h.empty() && std::isspace(static_cast<unsigned char>(h.back()))) h.remove_suffix(1);
  if (h.substr(0, 6) != "bytes=") return full;  // unknown unit: ignore
  h.remove_prefix(6);
  if (h.find(',') != std::string_view::npos) return full;
  const auto dash = h.find('-');
  if (dash == std::string_view::npos) return unsatisfiable;
  const auto first = parse_u64(h.substr(0, dash));
  const auto last = parse_u64(h.substr(dash + 1));
  if (size == 0) return unsatisfiable;
  if (!first && dash != 0) return unsatisfiable;
  if (!first) {
    if (!last || *last == 0) return unsatisfiable;
    const std::uint64_t n = std::min(*last, size);
    return {RangeDecision::Kind::Partial, size - n, size - 1};
  }
  if (h.substr(dash + 1).empty()) {
    if (*first >= size) return unsatisfiable;
    return {RangeDecision::Kind::Partial, *first, size - 1};
  }
  if (!last || *last < *first || *first >= size) return unsatisfiable;
  return {RangeDecision::Kind::Partial, *first, std::min(*last, size - 1)};
}

Api::Api(fs::path root) : root_(std::move(root)) {}

std::shared_ptr<const store::TrialBundle> Api::trial(const TrialRef& ref) const {
  const auto stamp = store::trial_stamp(root_, ref);
  if (!stamp) throw Error(ErrorCode::NotFound, "trial " + ref.to_string() + " not found");
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(ref);
    if (it != cache_.end() && it->second.stamp == *stamp) return it->second.bundle;
  }
  auto bundle = std::make_shared<const store::TrialBundle>(store::load_trial(root_, ref));
  std::unique_lock lock(mutex_);
  if (cache_.size() >= kMaxCacheEntries) cache_.clear();
  cache_[ref] = Entry{*stamp, bundle};
  return bundle;
}

EnsemblePayload Api::ensemble(const EnsembleRequest& req) const {
  if (req.trials_a.empty()) bad_request("trials_a must not be empty");
  if (req.points < 2 || req.points > kMaxPoints) bad_request("points out of range");
  EnsemblePayload payload;
  auto curves_of = [&](const std::vector<TrialRef>& refs) {
    std::vector<NormalizedCurve> curves;
    for (const auto& ref : refs) {
      const auto bundle = trial(ref);
      const GaitEvents* ev = bundle->events();
      if (ev == nullptr) throw Error(ErrorCode::MissingEvents, "trial " + ref.to_string() + " has no events");
      const auto probe = resolve_variable(req.variable, req.side, nullptr);
      const TimeSeriesTable* table = bundle->table(probe.first);
      if (table == nullptr) {
        throw Error(ErrorCode::ChannelMissing, "trial " + ref.to_string() + " has no " +
                                                   formats::file_name(probe.first));
      }
      const auto [kind, channel] = resolve_variable(req.variable, req.side, table);
      if (!table->find(channel)) {
        throw Error(ErrorCode::ChannelMissing,
                    "trial " + ref.to_string() + ": no channel for '" + req.variable + "'");
      }
      payload.channel = channel;
      std::vector<std::size_t> cycles;
      switch (req.cycle.mode) {
        case CycleSelection::Mode::First: cycles = {0}; break;
        case CycleSelection::Mode::Index: cycles = {req.cycle.index}; break;
        case CycleSelection::Mode::All:
          for (std::size_t k = 0; k < cycle_count(*ev, req.side); ++k) cycles.push_back(k);
          if (cycles.empty()) {
            throw Error(ErrorCode::CycleOutOfRange, "trial " + ref.to_string() + " has no complete " +
                                                        std::string(side_name(req.side)) + " cycle");
          }
          break;
      }
      for (std::size_t k : cycles) {
        try {
          auto curve = features::normalize_gait_cycle(*table, channel, *ev, req.side, k, req.points);
          curve.source = ref;
          curves.push_back(std::move(curve));
        } catch (const Error& e) {
          throw Error(e.code(), "trial " + ref.to_string() + ": " + e.what());
        }
      }
    }
    return curves;
  };
  payload.group_a = stats::ensemble_mean_ci(curves_of(req.trials_a), req.alpha);
  if (!req.trials_b.empty()) payload.group_b = stats::ensemble_mean_ci(curves_of(req.trials_b), req.alpha);
  return payload;
}

SpatiotemporalRow Api::trial_parameters(const TrialRef& ref) const {
  const auto bundle = trial(ref);
  if (const auto* row = bundle->spatiotemporal()) return *row;
  const auto* motion = bundle->table(CanonicalKind::Motion);
  const auto* ev = bundle->events();
  if (motion == nullptr || ev == nullptr) {
    throw Error(ErrorCode::InsufficientData,
                "trial " + ref.to_string() + " has neither spatiotemporal.csv nor motion and events");
  }
  MarkerSet markers = MarkerSet::standard();
  if (bundle->meta.extra.contains("markers")) markers = MarkerSet::from_json(bundle->meta.extra["markers"].dump());
  try {
    return features::spatiotemporal_params(*motion, markers, *ev);
  } catch (const Error& e) {
    throw Error(ErrorCode::InsufficientData, "trial " + ref.to_string() + ": " + e.what());
  }
}

SpatiotemporalPayload Api::spatiotemporal(const std::vector<TrialRef>& trials_a,
                                          const std::vector<TrialRef>& trials_b) const {
  if (trials_a.empty()) bad_request("trials_a must not be empty");
  SpatiotemporalPayload p;
  std::vector<SpatiotemporalRow> rows_a, rows_b;
  for (const auto& ref : trials_a) rows_a.push_back(p.per_trial[ref] = trial_parameters(ref));
  for (const auto& ref : trials_b) rows_b.push_back(p.per_trial[ref] = trial_parameters(ref));
  for (const auto& f : SpatiotemporalRow::fields()) {
    auto box_of = [&](const std::vector<TrialRef>& refs,
                      const std::vector<SpatiotemporalRow>& rows) -> std::optional<stats::BoxStats> {
      std::vector<stats::RefValue> values;
      for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& v = rows[i].*f.member;
        if (v && std::isfinite(*v)) values.emplace_back(refs[i], *v);
      }
      if (values.empty()) return std::nullopt;
      return stats::box_stats(values);
    };
    p.box[std::string(f.name)] = {box_of(trials_a, rows_a), box_of(trials_b, rows_b)};
  }
  p.radar = stats::radar_summary(rows_a, rows_b);
  return p;
}

TrialWindow Api::window(const TrialRef& ref, Side side, std::size_t cycle) const {
  const auto bundle = trial(ref);
  const GaitEvents* ev = bundle->events();
  if (ev == nullptr) throw Error(ErrorCode::MissingEvents, "trial " + ref.to_string() + " has no events");
  const CycleWindow w = cycle_window(*ev, side, cycle);
  return {w.t_start, w.t_end};
}

Response Api::get_groups() const {
  return guarded([&] {
    json groups = json::array();
    for (const auto& [g, patients] : store::list_hierarchy(root_)) groups.push_back(g);
    return json_response(groups);
  });
}

Response Api::get_patients(const std::string& group) const {
  return guarded([&] {
    if (!is_valid_component(group)) bad_request("invalid group name '" + group + "'");
    const auto tree = store::list_hierarchy(root_);
    auto it = tree.find(group);
    if (it == tree.end()) throw Error(ErrorCode::NotFound, "group " + group + " not found");
    json out = json::array();
    for (const auto& [p, trials] : it->second) out.push_back(p);
    return json_response(out);
  });
}

Response Api::get_trials(const std::string& group, const std::string& patient) const {
  return guarded([&] {
    if (!is_valid_component(group) || !is_valid_component(patient)) bad_request("invalid group or patient name");
    const auto tree = store::list_hierarchy(root_);
    auto g = tree.find(group);
    if (g == tree.end()) throw Error(ErrorCode::NotFound, "group " + group + " not found");
    auto p = g->second.find(patient);
    if (p == g->second.end()) throw Error(ErrorCode::NotFound, "patient " + group + "/" + patient + " not found");
    return json_response(p->second);
  });
}

Response Api::post_ensemble(const std::string& body) const {
  return guarded([&] { return json_response(to_json(ensemble(parse_ensemble_request(parse_body(body))))); });
}

Response Api::post_spatiotemporal(const std::string& body) const {
  return guarded([&] {
    const json j = parse_body(body);
    if (!j.is_object()) bad_request("request body must be a JSON object");
    return json_response(to_json(spatiotemporal(refs_from_json(j, "trials_a", true),
                                                refs_from_json(j, "trials_b", false))));
  });
}

Response Api::get_window(const std::string& group, const std::string& patient, const std::string& trial_id,
                         const std::optional<std::string>& side,
                         const std::optional<std::string>& cycle) const {
  return guarded([&] {
    TrialRef ref;
    try {
      ref = TrialRef::make(group, patient, trial_id);
    } catch (const Error& e) {
      bad_request(e.what());
    }
    const Side s = side ? side_from_text(*side) : Side::Left;
    const CycleSelection c = cycle ? parse_cycle(json(*cycle)) : CycleSelection{};
    if (c.mode == CycleSelection::Mode::All) bad_request("cycle must be 'first' or an index for a window");
    const std::size_t index = c.mode == CycleSelection::Mode::Index ? c.index : 0;
    const TrialWindow w = window(ref, s, index);
    return json_response({{"ref", ref.to_string()},
                          {"side", std::string(side_name(s))},
                          {"cycle", index},
                          {"t_start", w.t_start},
                          {"t_end", w.t_end}});
  });
}

Response Api::get_video(const std::string& group, const std::string& patient, const std::string& trial_id,
                        const std::optional<std::string>& range) const {
  return guarded([&] {
    TrialRef ref;
    try {
      ref = TrialRef::make(group, patient, trial_id);
    } catch (const Error& e) {
      bad_request(e.what());
    }
    const fs::path dir = store::trial_dir(root_, ref);
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::NotFound, "trial " + ref.to_string() + " not found");
    const fs::path video = dir / store::kVideoFile;
    if (!fs::is_regular_file(video, ec)) throw Error(ErrorCode::NoVideo, "trial " + ref.to_string() + " has no video");
    const std::uint64_t size = fs::file_size(video, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot stat video: " + ec.message());
    const RangeDecision d = decide_range(range, size);
    Response r;
    r.content_type = "video/mp4";
    r.headers.emplace_back("Accept-Ranges", "bytes");
    switch (d.kind) {
      case RangeDecision::Kind::Unsatisfiable: {
        r = error_response(Error(ErrorCode::RangeNotSatisfiable,
                                 "range '" + range.value_or("") + "' does not fit " + std::to_string(size) + " bytes"));
        r.headers.emplace_back("Content-Range", "bytes */" + std::to_string(size));
        return r;
      }
      case RangeDecision::Kind::Partial:
        r.status = 206;
        r.body = read_range(video, d.first, d.last - d.first + 1);
        r.headers.emplace_back("Content-Range", "bytes " + std::to_string(d.first) + "-" +
                                                    std::to_string(d.last) + "/" + std::to_string(size));
        return r;
      case RangeDecision::Kind::Full:
        r.body = read_range(video, 0, size);
        return r;
    }
    return r;
  });
}

}  // namespace gaitkit::service
