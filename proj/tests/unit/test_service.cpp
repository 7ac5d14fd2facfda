#include <future>
#include <thread>

#include "doctest.h"
#include "fixture_store.hpp"
#include "golden.hpp"
#include "service_cases.hpp"
#include "httplib.h"
#include "json.hpp"

#include "gaitkit/service/api.hpp"
#include "gaitkit/service/server.hpp"

using namespace gaitkit;
using namespace gaitkit::service;
using gaitkit::testing::check_golden;
using gaitkit::testing::golden_cases;
using gaitkit::testing::header_of;
using gaitkit::testing::render;
using gaitkit::testing::TempDir;
using nlohmann::json;

namespace {

/// One store shared by every test case in this binary.
const fs::path& fixture_root() {
  static TempDir dir("gaitkit-service");
  static const bool written = (gaitkit::testing::write_fixture_store(dir.path()), true);
  (void)written;
  return dir.path();
}

}  // namespace

TEST_CASE("range header interpretation") {
  using K = RangeDecision::Kind;
  auto d = decide_range(std::nullopt, 1000);
  CHECK(d.kind == K::Full);
  CHECK(d.last == 999);
  d = decide_range("bytes=0-99", 1000);
  CHECK(d.kind == K::Partial);
  CHECK(d.first == 0);
  CHECK(d.last == 99);
  d = decide_range("bytes=990-2000", 1000);
  CHECK(d.kind == K::Partial);
  CHECK(d.last == 999);
  d = decide_range("bytes=-100", 1000);
  CHECK(d.first == 900);
  CHECK(d.last == 999);
  d = decide_range("bytes=-5000", 1000);
  CHECK(d.first == 0);
  d = decide_range("bytes=500-", 1000);
  CHECK(d.first == 500);
  CHECK(d.last == 999);
  CHECK(decide_range("bytes=0-1,5-9", 1000).kind == K::Full);
  CHECK(decide_range("items=0-1", 1000).kind == K::Full);
  for (const std::string bad : {"bytes=2000-", "bytes=1000-1000", "bytes=9-3", "bytes=-0", "bytes=x-3", "bytes=5", "bytes=-"}) {
    CAPTURE(bad);
    CHECK(decide_range(bad, 1000).kind == K::Unsatisfiable);
  }
  CHECK(decide_range("bytes=0-0", 0).kind == K::Unsatisfiable);
}

TEST_CASE("error codes map onto HTTP statuses") {
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::NoVideo) == 404);
  CHECK(http_status(ErrorCode::RangeNotSatisfiable) == 416);
  CHECK(http_status(ErrorCode::BadRequest) == 400);
  CHECK(http_status(ErrorCode::CycleOutOfRange) == 422);
  CHECK(http_status(ErrorCode::EmptyEnsemble) == 422);
  const auto r = error_response(Error(ErrorCode::MissingEvents, "x"));
  CHECK(r.status == 422);
  CHECK(json::parse(r.body) == json{{"error", "missing_events"}, {"detail", "x"}});
}

TEST_CASE("request parsing") {
  const auto req = parse_ensemble_request(json::parse(
      R"({"trials_a": ["a/b/c"], "trials_b": [{"group": "d", "patient_id": "e", "trial_id": "f"}],
          "variable": "grf.fz", "side": "right", "cycle": 2, "points": 51, "alpha": 0.1})"));
  CHECK(req.trials_a == std::vector<TrialRef>{TrialRef::make("a", "b", "c")});
  CHECK(req.trials_b[0].trial_id == "f");
  CHECK(req.side == Side::Right);
  CHECK(req.cycle.mode == CycleSelection::Mode::Index);
  CHECK(req.cycle.index == 2);
  CHECK(req.points == 51);
  CHECK(req.alpha == 0.1);
  auto bad = [](const char* text) {
    return gaitkit::testing::error_code_of([&] { parse_ensemble_request(json::parse(text)); });
  };
  CHECK(bad(R"([])") == ErrorCode::BadRequest);
  CHECK(bad(R"({"trials_a": [], "variable": "grf.fz"})") == ErrorCode::BadRequest);
  CHECK(bad(R"({"trials_a": ["a/b"], "variable": "grf.fz"})") == ErrorCode::BadRequest);
  CHECK(bad(R"({"trials_a": ["a/b/c"], "variable": "grf.fz", "points": 1})") == ErrorCode::BadRequest);
  CHECK(bad(R"({"trials_a": ["a/b/c"], "variable": "grf.fz", "alpha": 1})") == ErrorCode::BadRequest);
  CHECK(bad(R"({"trials_a": ["a/b/c"], "variable": "grf.fz", "cycle": -1})") == ErrorCode::BadRequest);
  CHECK(bad(R"({"trials_a": ["a/b/c"], "variable": "grf.fz", "side": "up"})") == ErrorCode::BadRequest);
  CHECK(parse_cycle(json("all")).mode == CycleSelection::Mode::All);
  CHECK(parse_cycle(json(nullptr)).mode == CycleSelection::Mode::First);
}

TEST_CASE("handlers match their golden responses") {
  const Api api(fixture_root());
  for (const auto& c : golden_cases()) {
    CAPTURE(c.name);
    check_golden("service/" + c.name + ".txt", render(c.call(api)));
  }
}

TEST_CASE("ensemble payload content") {
  const Api api(fixture_root());
  const auto r = api.post_ensemble(
      R"({"trials_a": ["healthy/h01/walk1", "healthy/h02/walk1"], "trials_b": ["stroke/s01/walk1"],
          "variable": "grf.fx", "points": 21})");
  REQUIRE(r.status == 200);
  const auto j = json::parse(r.body);
  CHECK(j["channel"] == "fx_l");
  CHECK(j["group_a"]["n"] == 2);
  CHECK(j["group_b"]["n"] == 1);
  CHECK(j["group_a"]["mean"].size() == 21);
  CHECK(j["group_a"]["per_trial"][1]["ref"] == "healthy/h02/walk1");
  for (std::size_t i = 0; i < 21; ++i) {
    CHECK(j["group_a"]["ci_low"][i].get<double>() <= j["group_a"]["mean"][i].get<double>());
    // a single-trial group has a degenerate band
    CHECK(j["group_b"]["ci_low"][i] == j["group_b"]["mean"][i]);
  }
}

TEST_CASE("spatiotemporal payload uses stored or computed parameters") {
  const Api api(fixture_root());
  const auto p = api.spatiotemporal({TrialRef::make("healthy", "h01", "walk1")},
                                    {TrialRef::make("stroke", "s01", "walk1"), TrialRef::make("stroke", "s02", "walk1")});
  CHECK(p.per_trial.size() == 3);
  const auto& speed = p.box.at("gait_speed");
  REQUIRE(speed.b);
  CHECK(speed.b->n == 2);
  CHECK(speed.b->median == doctest::Approx(0.625).epsilon(0.02));
  CHECK(*p.per_trial.at(TrialRef::make("stroke", "s02", "walk1")).gait_speed == doctest::Approx(0.65).epsilon(0.02));
}

TEST_CASE("video byte serving") {
  const Api api(fixture_root());
  const auto bytes = gaitkit::testing::fixture_video_bytes();
  const auto full = api.get_video("healthy", "h01", "walk1", std::nullopt);
  CHECK(full.status == 200);
  CHECK(full.content_type == "video/mp4");
  CHECK(full.body == bytes);
  const auto part = api.get_video("healthy", "h01", "walk1", "bytes=0-99");
  CHECK(part.status == 206);
  CHECK(part.body == bytes.substr(0, 100));
  CHECK(header_of(part, "Content-Range") == "bytes 0-99/1000");
  const auto tail = api.get_video("healthy", "h01", "walk1", "bytes=-10");
  CHECK(tail.body == bytes.substr(990));
  const auto multi = api.get_video("healthy", "h01", "walk1", "bytes=0-1,4-5");
  CHECK(multi.status == 200);
  CHECK(multi.body.size() == 1000);
  const auto bad = api.get_video("healthy", "h01", "walk1", "bytes=2000-");
  CHECK(bad.status == 416);
  CHECK(header_of(bad, "Content-Range") == "bytes */1000");
}

TEST_CASE("cached trials follow store updates") {
  TempDir root;
  gaitkit::testing::write_fixture_store(root.path());
  const Api api(root.path());
  const auto ref = TrialRef::make("stroke", "s01", "walk1");
  const auto first = api.trial(ref);
  CHECK(api.trial(ref) == first);
  auto changed = *first;
  changed.files.erase(formats::CanonicalKind::Events);
  changed.video.reset();
  store::save_trial(root.path(), changed);
  const auto second = api.trial(ref);
  CHECK(second != first);
  CHECK(second->events() == nullptr);
  CHECK(api.get_window("stroke", "s01", "walk1", std::nullopt, std::nullopt).status == 422);
}

TEST_CASE("HTTP routes serve the handler responses") {
  ServerConfig cfg;
  cfg.root = fixture_root();
  cfg.port = 0;
  cfg.cors_origin = "http://localhost:5173";
  HttpServer server(cfg);
  const int port = server.start();
  REQUIRE(port > 0);
  const Api api(fixture_root());
  httplib::Client client("127.0.0.1", port);

  for (const auto& c : golden_cases()) {
    CAPTURE(c.name);
    httplib::Headers headers;
    if (c.name == "video_unsatisfiable") headers.emplace("Range", "bytes=2000-");
    const auto res = c.method == "GET" ? client.Get(c.path, headers) : client.Post(c.path, c.body, "application/json");
    REQUIRE(res);
    const auto want = c.call(api);
    CHECK(res->status == want.status);
    CHECK(res->body == want.body);
    CHECK(res->get_header_value("Content-Type") == want.content_type);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  }

  auto video = client.Get("/api/video/healthy/h01/walk1", {{"Range", "bytes=0-99"}});
  REQUIRE(video);
  CHECK(video->status == 206);
  CHECK(video->body.size() == 100);
  CHECK(video->get_header_value("Content-Range") == "bytes 0-99/1000");
  CHECK(video->get_header_value("Content-Type") == "video/mp4");
  video = client.Get("/api/video/healthy/h01/walk1");
  REQUIRE(video);
  CHECK(video->status == 200);
  CHECK(video->body == gaitkit::testing::fixture_video_bytes());

  const auto unknown = client.Get("/api/nothing-here");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);
  CHECK(json::parse(unknown->body)["error"] == "not_found");

  const auto preflight = client.Options("/api/ensemble");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);
  server.stop();
}

TEST_CASE("concurrent identical requests give byte-identical payloads") {
  ServerConfig cfg;
  cfg.root = fixture_root();
  cfg.port = 0;
  HttpServer server(cfg);
  const int port = server.start();
  const std::string body = R"({"trials_a": ["healthy/h01/walk1", "healthy/h01/walk2", "healthy/h02/walk1"],
                               "trials_b": ["stroke/s01/walk1", "stroke/s02/walk1"], "variable": "joint_angles.knee",
                               "cycle": "all"})";
  constexpr int kClients = 8;
  std::vector<std::future<std::string>> results;
  for (int i = 0; i < kClients; ++i) {
    results.push_back(std::async(std::launch::async, [&] {
      httplib::Client client("127.0.0.1", port);
      std::string all;
      for (int k = 0; k < 3; ++k) {
        const auto res = (k % 2 == 0) ? client.Post("/api/ensemble", body, "application/json")
                                       : client.Post("/api/spatiotemporal", body, "application/json");
        all += res ? std::to_string(res->status) + res->body : std::string("no response");
      }
      return all;
    }));
  }
  std::vector<std::string> got;
  for (auto& f : results) got.push_back(f.get());
  for (const auto& g : got) CHECK(g == got.front());
  CHECK(got.front().rfind("200", 0) == 0);
  server.stop();
}

TEST_CASE("binding a busy port fails with an I/O error") {
  ServerConfig cfg;
  cfg.root = fixture_root();
  cfg.port = 0;
  HttpServer first(cfg);
  cfg.port = first.start();
  HttpServer second(cfg);
  CHECK(gaitkit::testing::error_code_of([&] { second.start(); }) == ErrorCode::IoFailure);
}
