#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaitkit/service/api.hpp"

namespace gaitkit::testing {

using service::Api;
using service::Response;

inline std::string header_of(const Response& r, const std::string& name) {
  for (const auto& [k, v] : r.headers) {
    if (k == name) return v;
  }
  return {};
}

inline std::string render(const Response& r) {
  std::string out = "status " + std::to_string(r.status) + "\ncontent-type " + r.content_type + "\n";
  if (const auto cr = header_of(r, "Content-Range"); !cr.empty()) out += "content-range " + cr + "\n";
  out += r.body + "\n";
  return out;
}

struct Case {
  std::string name;
  std::string method;  // GET or POST
  std::string path;
  std::string body;
  std::function<Response(const Api&)> call;
};

inline std::vector<Case> golden_cases() {
  const std::string ens_ab = R"({"trials_a": ["healthy/h01/walk1", "healthy/h01/walk2", "healthy/h02/walk1"],
                                 "trials_b": ["stroke/s01/walk1", "stroke/s02/walk1"],
                                 "variable": "grf.fx", "points": 11})";
  const std::string ens_all = R"({"trials_a": [{"group": "healthy", "patient_id": "h02", "trial_id": "walk1"}],
                                  "variable": "joint_angles.knee", "side": "right", "cycle": "all", "points": 6})";
  const std::string st_ab = R"({"trials_a": ["healthy/h01/walk1", "healthy/h01/walk2", "healthy/h02/walk1"],
                                "trials_b": ["stroke/s01/walk1", "stroke/s02/walk1"]})";
  auto post_ens = [](std::string body) { return [body](const Api& a) { return a.post_ensemble(body); }; };
  return {
      {"groups", "GET", "/api/groups", "", [](const Api& a) { return a.get_groups(); }},
      {"patients", "GET", "/api/groups/healthy/patients", "", [](const Api& a) { return a.get_patients("healthy"); }},
      {"patients_unknown", "GET", "/api/groups/elderly/patients", "",
       [](const Api& a) { return a.get_patients("elderly"); }},
      {"patients_bad_name", "GET", "/api/groups/Healthy/patients", "",
       [](const Api& a) { return a.get_patients("Healthy"); }},
      {"trials", "GET", "/api/groups/healthy/patients/h01/trials", "",
       [](const Api& a) { return a.get_trials("healthy", "h01"); }},
      {"trials_unknown_patient", "GET", "/api/groups/healthy/patients/h09/trials", "",
       [](const Api& a) { return a.get_trials("healthy", "h09"); }},
      {"ensemble_two_groups", "POST", "/api/ensemble", ens_ab, post_ens(ens_ab)},
      {"ensemble_all_cycles", "POST", "/api/ensemble", ens_all, post_ens(ens_all)},
      {"ensemble_bad_json", "POST", "/api/ensemble", "{\"trials_a\": [", post_ens("{\"trials_a\": [")},
      {"ensemble_no_variable", "POST", "/api/ensemble", R"({"trials_a": ["healthy/h01/walk1"]})",
       post_ens(R"({"trials_a": ["healthy/h01/walk1"]})")},
      {"ensemble_events_variable", "POST", "/api/ensemble",
       R"({"trials_a": ["healthy/h01/walk1"], "variable": "events.td"})",
       post_ens(R"({"trials_a": ["healthy/h01/walk1"], "variable": "events.td"})")},
      {"ensemble_unknown_trial", "POST", "/api/ensemble", R"({"trials_a": ["healthy/h01/walk9"], "variable": "grf.fz"})",
       post_ens(R"({"trials_a": ["healthy/h01/walk9"], "variable": "grf.fz"})")},
      {"ensemble_cycle_out_of_range", "POST", "/api/ensemble",
       R"({"trials_a": ["healthy/h01/walk1"], "variable": "grf.fz", "cycle": 7})",
       post_ens(R"({"trials_a": ["healthy/h01/walk1"], "variable": "grf.fz", "cycle": 7})")},
      {"ensemble_missing_channel", "POST", "/api/ensemble",
       R"({"trials_a": ["healthy/h01/walk1"], "variable": "motion.nose"})",
       post_ens(R"({"trials_a": ["healthy/h01/walk1"], "variable": "motion.nose"})")},
      {"spatiotemporal_two_groups", "POST", "/api/spatiotemporal", st_ab,
       [st_ab](const Api& a) { return a.post_spatiotemporal(st_ab); }},
      {"spatiotemporal_empty", "POST", "/api/spatiotemporal", R"({"trials_a": []})",
       [](const Api& a) { return a.post_spatiotemporal(R"({"trials_a": []})"); }},
      {"window", "GET", "/api/window/healthy/h01/walk1?side=right&cycle=1", "",
       [](const Api& a) { return a.get_window("healthy", "h01", "walk1", "right", "1"); }},
      {"window_default", "GET", "/api/window/stroke/s01/walk1", "",
       [](const Api& a) { return a.get_window("stroke", "s01", "walk1", std::nullopt, std::nullopt); }},
      {"window_cycle_out_of_range", "GET", "/api/window/healthy/h01/walk1?cycle=12", "",
       [](const Api& a) { return a.get_window("healthy", "h01", "walk1", std::nullopt, "12"); }},
      {"window_bad_side", "GET", "/api/window/healthy/h01/walk1?side=middle", "",
       [](const Api& a) { return a.get_window("healthy", "h01", "walk1", "middle", std::nullopt); }},
      {"video_unsatisfiable", "GET", "/api/video/healthy/h01/walk1", "",
       [](const Api& a) { return a.get_video("healthy", "h01", "walk1", "bytes=2000-"); }},
      {"video_missing", "GET", "/api/video/stroke/s01/walk1", "",
       [](const Api& a) { return a.get_video("stroke", "s01", "walk1", std::nullopt); }},
  };
}

}  // namespace gaitkit::testing
