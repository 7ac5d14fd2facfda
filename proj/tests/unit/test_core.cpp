#include <set>

#include "doctest.h"
#include "test_support.hpp"

#include "gaitkit/core/model.hpp"

using namespace gaitkit;
using gaitkit::testing::error_code_of;

TEST_CASE("error codes have distinct snake_case names and exit categories") {
  std::set<std::string> names;
  for (int c = 0; c <= static_cast<int>(ErrorCode::Usage); ++c) {
    const auto name = std::string(code_name(static_cast<ErrorCode>(c)));
    CHECK(names.insert(name).second);
    for (char ch : name) CHECK(((ch >= 'a' && ch <= 'z') || ch == '_' || (ch >= '0' && ch <= '9')));
  }
  CHECK(category_of(ErrorCode::Usage) == ErrorCategory::Usage);
  CHECK(category_of(ErrorCode::BadRequest) == ErrorCategory::Usage);
  CHECK(category_of(ErrorCode::IoFailure) == ErrorCategory::Io);
  CHECK(category_of(ErrorCode::NotFound) == ErrorCategory::Io);
  CHECK(category_of(ErrorCode::CutoffAboveNyquist) == ErrorCategory::Data);
  CHECK(code_name(ErrorCode::CutoffAboveNyquist) == "cutoff_above_nyquist");
}

TEST_CASE("table time axis, lookup and column edits") {
  TimeSeriesTable t(100.0, 0.5, {{"a", Unit::Meter}, {"b", Unit::Meter}}, {{1, 2}, {3, 4}, {5, 6}});
  CHECK(t.time(2) == doctest::Approx(0.52));
  CHECK(t.end_time() == doctest::Approx(0.52));
  CHECK(t.find("b") == 1u);
  CHECK_FALSE(t.find("c"));
  CHECK(error_code_of([&] { (void)t.index_of("c"); }) == ErrorCode::ChannelMissing);
  CHECK(t.column("b") == std::vector<double>{2, 4, 6});

  const std::vector<double> repl{7, kMissing, 9};
  const auto u = t.with_column(0, repl);
  CHECK(u.column_has_missing(0));
  CHECK_FALSE(u.column_has_missing(1));
  CHECK(u.has_missing());
  CHECK_FALSE(t.has_missing());

  const std::vector<std::string> pick{"b"};
  const auto s = t.select(pick);
  CHECK(s.channel_count() == 1);
  CHECK(s.column(0) == std::vector<double>{2, 4, 6});
}

TEST_CASE("table equality treats missing cells as equal to each other only") {
  TimeSeriesTable a(10.0, 0.0, {{"x", Unit::Unitless}}, {{kMissing}, {1.0}});
  TimeSeriesTable b(10.0, 0.0, {{"x", Unit::Unitless}}, {{kMissing}, {1.0}});
  TimeSeriesTable c(10.0, 0.0, {{"x", Unit::Unitless}}, {{0.0}, {1.0}});
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("validate_table reports broken invariants") {
  CHECK(validate_table(TimeSeriesTable(10.0, 0.0, {{"x", Unit::Unitless}}, {{1.0}})).empty());
  CHECK_FALSE(validate_table(TimeSeriesTable(0.0, 0.0, {{"x", Unit::Unitless}}, {{1.0}})).empty());
  CHECK_FALSE(validate_table(TimeSeriesTable(10.0, 0.0, {{"x", Unit::Unitless}, {"x", Unit::Unitless}},
                                             {{1.0, 2.0}}))
                  .empty());
  CHECK_FALSE(validate_table(TimeSeriesTable(10.0, 0.0, {{"x", Unit::Unitless}}, {{1.0, 2.0}})).empty());
}

TEST_CASE("interpolate_at is linear inside and clamped outside") {
  TimeSeriesTable t(10.0, 1.0, {{"x", Unit::Unitless}}, {{0.0}, {10.0}, {30.0}});
  CHECK(interpolate_at(t, 0, 1.05) == doctest::Approx(5.0));
  CHECK(interpolate_at(t, 0, 1.15) == doctest::Approx(20.0));
  CHECK(interpolate_at(t, 0, 0.0) == 0.0);
  CHECK(interpolate_at(t, 0, 9.0) == 30.0);
  TimeSeriesTable m(10.0, 0.0, {{"x", Unit::Unitless}}, {{0.0}, {kMissing}});
  CHECK(is_missing(interpolate_at(m, 0, 0.05)));
}

TEST_CASE("gait events enforce alternation per foot") {
  using enum EventKind;
  CHECK(event_violations({{Side::Left, Touchdown, 0.1}, {Side::Left, Toeoff, 0.5}}).empty());
  CHECK_FALSE(event_violations({{Side::Left, Toeoff, 0.1}}).empty());
  CHECK_FALSE(event_violations({{Side::Left, Touchdown, 0.1}, {Side::Left, Touchdown, 0.5}}).empty());
  CHECK_FALSE(event_violations({{Side::Left, Touchdown, 0.5}, {Side::Left, Toeoff, 0.1}}).empty());
  CHECK(error_code_of([] { GaitEvents({{Side::Right, Toeoff, 0.0}}); }).has_value());

  const auto ev = make_events({{Side::Right, Touchdown, 0.3},
                               {Side::Left, Touchdown, 0.0},
                               {Side::Left, Toeoff, 0.6},
                               {Side::Left, Touchdown, 1.0},
                               {Side::Left, Toeoff, 1.6},
                               {Side::Left, Touchdown, 2.0}});
  CHECK(ev.events().front().foot == Side::Left);
  CHECK(ev.touchdowns(Side::Left) == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(cycle_count(ev, Side::Left) == 2);
  CHECK(cycle_count(ev, Side::Right) == 0);
  CHECK(cycle_window(ev, Side::Left, 1).t_start == 1.0);
  CHECK(cycle_window(ev, Side::Left, 1).t_end == 2.0);
  CHECK(error_code_of([&] { cycle_window(ev, Side::Left, 2); }) == ErrorCode::CycleOutOfRange);
}

TEST_CASE("trial refs follow the naming pattern") {
  const auto r = TrialRef::make("stroke", "p01", "walk_1");
  CHECK(r.to_string() == "stroke/p01/walk_1");
  CHECK(TrialRef::parse("stroke/p01/walk_1") == r);
  for (const char* bad : {"", "Upper", "-lead", "a/b", "..", ".hidden", "sp ace"}) {
    CHECK_MESSAGE(!is_valid_component(bad), bad);
    CHECK(error_code_of([&] { TrialRef::make(bad, "p", "t"); }) == ErrorCode::PathInvalid);
  }
  CHECK(error_code_of([] { TrialRef::parse("a/b"); }) == ErrorCode::PathInvalid);
  CHECK(TrialRef::make("a", "b", "c") < TrialRef::make("a", "b", "d"));
}

TEST_CASE("marker sets map roles onto channel prefixes") {
  const auto std_set = MarkerSet::standard();
  CHECK(std_set.prefix(MarkerRole::Heel, Side::Left) == "HEE_L");
  CHECK(std_set.prefix(MarkerRole::Toe, Side::Right) == "TOE_R");

  const auto custom = MarkerSet::from_json(R"({"HEE_L": "LHEE", "SHO": "C7"})");
  CHECK(custom.prefix(MarkerRole::Heel, Side::Left) == "LHEE");
  CHECK(custom.central(MarkerRole::Shoulder) == "C7");
  CHECK_FALSE(custom.prefix(MarkerRole::Heel, Side::Right));
  CHECK(error_code_of([] { MarkerSet::from_json(R"({"HEE": "X"})"); }) == ErrorCode::SchemaMismatch);
  CHECK(error_code_of([] { MarkerSet::from_json("[1]"); }) == ErrorCode::SchemaMismatch);
  CHECK(error_code_of([] { MarkerSet::from_json("{"); }) == ErrorCode::SchemaMismatch);

  TimeSeriesTable motion(100.0, 0.0, {{"LHEE_x", Unit::Meter}, {"LHEE_y", Unit::Meter}, {"LHEE_z", Unit::Meter}},
                         {{0, 0, 0}});
  CHECK(resolve_marker(motion, "LHEE").z == 2);
  CHECK(error_code_of([&] { resolve_marker(motion, "RHEE"); }) == ErrorCode::MarkerMissing);
}

TEST_CASE("side and event names round-trip") {
  for (auto s : {Side::Left, Side::Right}) CHECK(parse_side(side_name(s)) == s);
  for (auto k : {EventKind::Touchdown, EventKind::Toeoff}) CHECK(parse_event_kind(event_kind_name(k)) == k);
  CHECK_FALSE(parse_side("up"));
  for (auto u : {Unit::Meter, Unit::Newton, Unit::Degree, Unit::Volt, Unit::Unitless}) {
    CHECK(parse_unit(unit_name(u)) == u);
  }
}
