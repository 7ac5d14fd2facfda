// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "fixture_store.hpp"
#include "httplib.h"
#include "json.hpp"
#include "mutate.hpp"
#include "random_tables.hpp"
#include "service_cases.hpp"
#include "test_support.hpp"

#include "gaitkit/features/events.hpp"
#include "gaitkit/features/spatiotemporal.hpp"
#include "gaitkit/formats/c3d.hpp"
#include "gaitkit/formats/canonical_csv.hpp"
#include "gaitkit/formats/mat.hpp"
#include "gaitkit/formats/trc.hpp"
#include "gaitkit/service/api.hpp"
#include "gaitkit/service/server.hpp"
#include "gaitkit/signal/filter.hpp"
#include "gaitkit/stats/stats.hpp"
#include "gaitkit/synth/generator.hpp"

using namespace gaitkit;
using formats::CanonicalKind;
using gaitkit::testing::fixture_dir;
using gaitkit::testing::mutate;
using gaitkit::testing::slurp;
using gaitkit::testing::slurp_bytes;
using gaitkit::testing::TempDir;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRoundTripTol = 1e-9;
constexpr double kRoundTripBudgetS = 30.0;
constexpr int kTablesPerKind = 200;
constexpr int kFuzzCases = 10000;
constexpr double kCutoffGain = 0.5;
constexpr double kCutoffGainRelTol = 0.02;
constexpr int kEventTrials = 100;
constexpr double kStanceSwingTol = 1e-9;
constexpr double kCiHalfWidth = 12.706;
constexpr double kCiTol = 1e-3;
constexpr double kOffsetN = -20.0;
constexpr double kOffsetTolN = 0.5;
constexpr double kOffsetPointShare = 0.90;
constexpr double kSpeedGap = 0.4;
constexpr double kSpeedGapTol = 0.02;
constexpr double kEnsembleBudgetS = 10.0;

/// Collects failure notes for one criterion.
struct Report {
  std::vector<std::string> notes;
  void fail(const std::string& note) {
    if (notes.size() < 8) notes.push_back(note);
    else if (notes.size() == 8) notes.push_back("...");
  }
  bool ok() const { return notes.empty(); }
};

std::string seconds(Clock::duration d) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::fixed << std::chrono::duration<double>(d).count() << " s";
  return ss.str();
}

bool same_cell(double a, double b, double tol) {
  if (is_missing(a) || is_missing(b)) return is_missing(a) && is_missing(b);
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
}

bool same_optional(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (!a || !b) return !a && !b;
  return same_cell(*a, *b, tol);
}

/// One float32 unit in the last place around v.
double float_ulp(double v) {
  const float f = static_cast<float>(v);
  return static_cast<double>(std::nextafter(std::abs(f), std::numeric_limits<float>::infinity()) - std::abs(f));
}

// --- 1 ---------------------------------------------------------------------

std::string ac1_round_trips(Report& r) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  for (auto kind : {CanonicalKind::Motion, CanonicalKind::Grf, CanonicalKind::JointAngles}) {
    for (int i = 0; i < kTablesPerKind; ++i) {
      const auto t = gaitkit::testing::random_table(rng, kind);
      const auto back = formats::read_table_csv(formats::write_table_csv(t, kind), kind);
      bool ok = back.row_count() == t.row_count() && back.channel_count() == t.channel_count() &&
                same_cell(back.sample_rate(), t.sample_rate(), kRoundTripTol);
      for (std::size_t row = 0; ok && row < t.row_count(); ++row) {
        ok = same_cell(back.time(row), t.time(row), kRoundTripTol);
        for (std::size_t c = 0; ok && c < t.channel_count(); ++c) ok = same_cell(back.at(row, c), t.at(row, c), kRoundTripTol);
      }
      if (!ok) r.fail(std::string(formats::kind_name(kind)) + " table " + std::to_string(i));
    }
  }
  for (int i = 0; i < kTablesPerKind; ++i) {
    const auto ev = gaitkit::testing::random_events(rng);
    const auto back = formats::read_events_csv(formats::write_events_csv(ev));
    bool ok = back.size() == ev.size();
    for (std::size_t k = 0; ok && k < ev.size(); ++k) {
      ok = back.events()[k].foot == ev.events()[k].foot && back.events()[k].kind == ev.events()[k].kind &&
           same_cell(back.events()[k].time, ev.events()[k].time, kRoundTripTol);
    }
    if (!ok) r.fail("events " + std::to_string(i));
    const auto row = gaitkit::testing::random_row(rng);
    const auto row_back = formats::read_spatiotemporal_csv(formats::write_spatiotemporal_csv(row));
    for (const auto& f : SpatiotemporalRow::fields()) {
      if (!same_optional(row.*f.member, row_back.*f.member, kRoundTripTol)) r.fail("spatiotemporal " + std::to_string(i));
    }
  }
  // C3D: random captures through the float writer and back.
  for (int i = 0; i < kTablesPerKind; ++i) {
    formats::RawCapture cap;
    const std::size_t markers = 1 + rng() % 6, analogs = rng() % 4, frames = 2 + rng() % 60;
    const double rate = std::vector<double>{50, 100, 120, 150, 200}[rng() % 5];
    const std::size_t ratio = 1 + rng() % 5;
    std::vector<Channel> pch;
    for (std::size_t m = 0; m < markers; ++m) {
      cap.point_labels.push_back("M" + std::to_string(m));
      for (const char* ax : {"_x", "_y", "_z"}) pch.push_back({cap.point_labels.back() + ax, Unit::Meter});
    }
    std::vector<std::vector<double>> prow(frames, std::vector<double>(pch.size()));
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    for (auto& row : prow) {
      for (std::size_t m = 0; m < markers; ++m) {
        const bool gap = rng() % 25 == 0;
        for (int a = 0; a < 3; ++a) row[3 * m + a] = gap ? kMissing : pos(rng);
      }
    }
    std::vector<Channel> ach;
    for (std::size_t a = 0; a < analogs; ++a) {
      cap.analog_labels.push_back("A" + std::to_string(a));
      ach.push_back({cap.analog_labels.back(), Unit::Newton});
    }
    std::vector<std::vector<double>> arow(analogs == 0 ? 0 : frames * ratio, std::vector<double>(analogs));
    std::uniform_real_distribution<double> force(-2000.0, 2000.0);
    for (auto& row : arow) {
      for (auto& v : row) v = force(rng);
    }
    const double start = static_cast<double>(rng() % 50) / rate;
    cap.points = TimeSeriesTable(rate, start, pch, prow);
    cap.analog = TimeSeriesTable(rate * static_cast<double>(ratio), start, ach, arow);
    const auto back = formats::parse_c3d(formats::write_c3d(cap));
    std::string why;
    if (back.points.row_count() != frames) why = "frames " + std::to_string(back.points.row_count());
    else if (back.analog.row_count() != arow.size()) why = "analog rows " + std::to_string(back.analog.row_count());
    else if (back.point_labels != cap.point_labels || back.analog_labels != cap.analog_labels) why = "labels";
    bool ok = why.empty();
    for (std::size_t f = 0; ok && f < frames; ++f) {
      for (std::size_t c = 0; ok && c < pch.size(); ++c) {
        const double want = prow[f][c], got = back.points.at(f, c);
        ok = is_missing(want) ? is_missing(got) : std::abs(got - want) <= float_ulp(want);
        if (!ok) why = "point " + std::to_string(f) + "," + std::to_string(c);
      }
    }
    for (std::size_t f = 0; ok && f < arow.size(); ++f) {
      for (std::size_t c = 0; ok && c < analogs; ++c) {
        ok = std::abs(back.analog.at(f, c) - arow[f][c]) <= float_ulp(arow[f][c]);
        if (!ok) why = "analog " + std::to_string(f) + "," + std::to_string(c);
      }
    }
    if (!ok) r.fail("c3d capture " + std::to_string(i) + ": " + why);
  }
  const auto elapsed = Clock::now() - t0;
  if (std::chrono::duration<double>(elapsed).count() >= kRoundTripBudgetS) r.fail("took " + seconds(elapsed));
  return std::to_string(kTablesPerKind) + " per kind + " + std::to_string(kTablesPerKind) + " C3D captures in " +
         seconds(elapsed);
}

// --- 2 ---------------------------------------------------------------------

std::string trc_seed() {
  return "PathFileType\t4\t(X/Y/Z)\twalk.trc\n"
         "DataRate\tCameraRate\tNumFrames\tNumMarkers\tUnits\tOrigDataRate\tOrigDataStartFrame\tOrigNumFrames\n"
         "100\t100\t4\t2\tmm\t100\t1\t4\n"
         "Frame#\tTime\tLHEE\t\t\tRHEE\n"
         "\t\tX1\tY1\tZ1\tX2\tY2\tZ2\n"
         "1\t0.00\t100.5\t200\t300\t400\t500\t600\n"
         "2\t0.01\t110\t210\t310\t\t\t\n"
         "3\t0.02\t120\t220\t320\t420\t520\t620\n"
         "4\t0.03\t130\t230\t330\t430\t530\t630\n";
}

std::string ac2_fuzz(Report& r) {
  std::vector<std::vector<std::uint8_t>> c3d_seeds, mat_seeds, trc_seeds;
  for (const char* f : {"int16.c3d", "float.c3d"}) c3d_seeds.push_back(slurp_bytes(fixture_dir() / "fixtures/c3d" / f));
  {
    synth::GaitConfig cfg;
    cfg.cycles = 2;
    const auto trial = synth::generate(cfg);
    formats::RawCapture cap;
    for (std::size_t c = 0; c < trial.motion.channel_count(); c += 3) {
      const auto& n = trial.motion.channels()[c].name;
      cap.point_labels.push_back(n.substr(0, n.size() - 2));
    }
    const auto ratio = static_cast<std::size_t>(std::lround(trial.grf.sample_rate() / trial.motion.sample_rate()));
    const std::size_t frames = std::min(trial.motion.row_count(), trial.grf.row_count() / ratio);
    const auto& mrows = trial.motion.rows();
    const auto& grows = trial.grf.rows();
    cap.points = TimeSeriesTable(trial.motion.sample_rate(), trial.motion.start_time(), trial.motion.channels(),
                                 {mrows.begin(), mrows.begin() + static_cast<std::ptrdiff_t>(frames)});
    cap.analog_labels = {"fx_l", "fy_l", "fz_l", "fx_r", "fy_r", "fz_r"};
    cap.analog = TimeSeriesTable(trial.grf.sample_rate(), trial.grf.start_time(), trial.grf.channels(),
                                 {grows.begin(), grows.begin() + static_cast<std::ptrdiff_t>(frames * ratio)});
    c3d_seeds.push_back(formats::write_c3d(cap));
  }
  for (const char* f : {"plain.mat", "compressed.mat"}) mat_seeds.push_back(slurp_bytes(fixture_dir() / "fixtures/mat" / f));
  const auto trc = trc_seed();
  trc_seeds.emplace_back(trc.begin(), trc.end());

  std::mt19937_64 rng(202);
  int typed = 0, accepted = 0;
  for (int i = 0; i < kFuzzCases; ++i) {
    const int which = i % 3;
    const auto& seeds = which == 0 ? c3d_seeds : which == 1 ? mat_seeds : trc_seeds;
    const auto input = mutate(seeds[rng() % seeds.size()], rng);
    const char* name = which == 0 ? "c3d" : which == 1 ? "mat" : "trc";
    try {
      Warnings w;
      if (which == 0) {
        (void)formats::parse_c3d(input, &w);
      } else if (which == 1) {
        (void)formats::parse_mat(input, &w);
      } else {
        (void)formats::parse_trc(std::string_view(reinterpret_cast<const char*>(input.data()), input.size()), &w);
      }
      ++accepted;
    } catch (const Error&) {
      ++typed;
    } catch (const std::exception& e) {
      r.fail(std::string(name) + " case " + std::to_string(i) + " threw untyped: " + e.what());
    } catch (...) {
      r.fail(std::string(name) + " case " + std::to_string(i) + " threw a non-exception");
    }
  }
  return std::to_string(kFuzzCases) + " cases: " + std::to_string(typed) + " typed errors, " +
         std::to_string(accepted) + " accepted";
}

// --- 3 ---------------------------------------------------------------------

std::string ac3_filter(Report& r) {
  const double fs = 1000.0, fc = 10.0;
  const signal::FilterSpec spec{fc, 4, true};
  for (double level : {0.0, 1.0, -3.25, 812.5, 1e6}) {
    const std::vector<double> x(500, level);
    const auto y = signal::lowpass(x, spec, fs);
    for (double v : y) {
      if (v != level) {
        r.fail("constant " + std::to_string(level) + " not preserved exactly");
        break;
      }
    }
  }
  // 50 cycles at the cutoff; least-squares amplitude over the middle 30 cycles
  const std::size_t per_cycle = static_cast<std::size_t>(fs / fc);
  const std::size_t n = 50 * per_cycle;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * fc * static_cast<double>(i) / fs);
  const auto y = signal::lowpass(x, spec, fs);
  double ss = 0, cc = 0, sc = 0, ys = 0, yc = 0;
  for (std::size_t i = 10 * per_cycle; i < 40 * per_cycle; ++i) {
    const double w = 2.0 * std::numbers::pi * fc * static_cast<double>(i) / fs;
    const double s = std::sin(w), c = std::cos(w);
    ss += s * s;
    cc += c * c;
    sc += s * c;
    ys += y[i] * s;
    yc += y[i] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (ys * cc - yc * sc) / det, b = (yc * ss - ys * sc) / det;
  const double amp = std::hypot(a, b);
  if (std::abs(amp - kCutoffGain) > kCutoffGainRelTol * kCutoffGain) r.fail("gain at cutoff " + std::to_string(amp));
  std::ostringstream note;
  note << "DC exact on 5 levels, gain at cutoff " << amp;
  return note.str();
}

// --- 4 ---------------------------------------------------------------------

std::string ac4_events(Report& r) {
  std::mt19937_64 rng(404);
  std::size_t events = 0, blips = 0;
  double worst = 0.0;
  for (int i = 0; i < kEventTrials; ++i) {
    synth::GaitConfig cfg;
    cfg.cadence = 80.0 + 50.0 * static_cast<double>(i) / (kEventTrials - 1);
    cfg.stance_fraction = std::uniform_real_distribution<double>(0.58, 0.66)(rng);
    cfg.step_length_l = std::uniform_real_distribution<double>(0.45, 0.75)(rng);
    cfg.step_length_r = std::uniform_real_distribution<double>(0.45, 0.75)(rng);
    cfg.blips = 1 + rng() % 5;
    cfg.dropouts = rng() % 3;
    cfg.seed = rng();
    const auto trial = synth::generate(cfg);
    for (const auto& b : trial.blips) {
      if (b.end - b.begin >= 0.050) r.fail("trial " + std::to_string(i) + " has a blip of 50 ms or more");
    }
    blips += trial.blips.size();
    const auto got = features::detect_gait_events(trial.grf);
    const double period = 1.0 / trial.grf.sample_rate();
    if (got.size() != trial.events.size()) {
      r.fail("trial " + std::to_string(i) + ": " + std::to_string(got.size()) + " events, expected " +
             std::to_string(trial.events.size()));
      continue;
    }
    for (std::size_t k = 0; k < got.size(); ++k) {
      const auto& a = got.events()[k];
      const auto& b = trial.events.events()[k];
      const double err = std::abs(a.time - b.time);
      worst = std::max(worst, err);
      if (a.foot != b.foot || a.kind != b.kind || err > period + 1e-12) {
        r.fail("trial " + std::to_string(i) + " event " + std::to_string(k) + " off by " + std::to_string(err));
      }
    }
    events += got.size();
  }
  std::ostringstream note;
  note << events << " events over " << kEventTrials << " trials, " << blips << " blips removed, worst error "
       << worst * 1000.0 << " ms";
  return note.str();
}

// --- 5 ---------------------------------------------------------------------

std::string ac5_spatiotemporal(Report& r) {
  std::size_t trials = 0;
  for (double step : {0.4, 0.5, 0.6, 0.7, 0.8}) {
    for (double speed : {0.5, 0.7, 0.9, 1.1, 1.4}) {
      synth::GaitConfig cfg;
      cfg.step_length_l = step;
      cfg.step_length_r = std::min(0.8, step + 0.03);
      cfg.set_speed(speed);
      if (cfg.cadence < 40.0 || cfg.cadence > 200.0) continue;  // outside the walking range the generator models
      const auto trial = synth::generate(cfg);
      const auto ev = features::detect_gait_events(trial.grf);
      const auto row = features::spatiotemporal_params(trial.motion, MarkerSet::standard(), ev);
      ++trials;
      const std::string tag = "step " + std::to_string(step) + " speed " + std::to_string(speed) + ": ";
      for (const auto& f : SpatiotemporalRow::fields()) {
        const auto& got = row.*f.member;
        const auto& want = trial.truth.*f.member;
        const auto& tol = trial.tolerance.*f.member;
        if (!got || !want || !tol) {
          r.fail(tag + std::string(f.name) + " missing");
        } else if (std::abs(*got - *want) > *tol + 1e-12) {
          r.fail(tag + std::string(f.name) + " = " + std::to_string(*got) + " vs " + std::to_string(*want));
        }
      }
      for (const auto& [stance, swing] : {std::pair{row.stance_time_l, row.swing_time_l}, std::pair{row.stance_time_r, row.swing_time_r}}) {
        if (stance && swing && row.gait_time && std::abs(*stance + *swing - *row.gait_time) > kStanceSwingTol) {
          r.fail(tag + "stance + swing != gait time");
        }
      }
    }
  }
  return std::to_string(trials) + " step/speed combinations within tolerance";
}

// --- 6 ---------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GAITKIT_CLI_EXE + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string ac6_negative_step(Report& r) {
  TempDir dir("gaitkit-accept");
  const std::string d = dir.path().string();
  std::string step_before, step_after;
  if (run_cli("synth --out " + d + " --half-landing") != 0) {
    r.fail("synth failed");
    return "";
  }
  if (run_cli("extract events --grf " + d + "/grf.csv --out " + d + "/raw/events.csv") != 0 ||
      run_cli("extract spatio --motion " + d + "/motion.csv --events " + d + "/raw/events.csv --out " + d + "/raw/") != 0 ||
      run_cli("extract events --grf " + d + "/grf.csv --discard-partial --meta " + d + "/meta.json --out " + d +
              "/clean/events.csv") != 0 ||
      run_cli("extract spatio --motion " + d + "/motion.csv --events " + d + "/clean/events.csv --out " + d + "/clean/") != 0) {
    r.fail("a CLI step failed");
    return "";
  }
  const auto raw = formats::read_spatiotemporal_csv(slurp(dir / "raw/spatiotemporal.csv"));
  const auto clean = formats::read_spatiotemporal_csv(slurp(dir / "clean/spatiotemporal.csv"));
  synth::GaitConfig cfg;
  cfg.half_landing = true;
  const auto truth = synth::generate(cfg);
  if (!raw.step_length_l || !(*raw.step_length_l < 0.0)) r.fail("step_length_l not negative before discarding");
  if (!clean.step_length_l || !(*clean.step_length_l > 0.0)) r.fail("step_length_l not positive after discarding");
  for (const auto& f : SpatiotemporalRow::fields()) {
    const auto& got = clean.*f.member;
    if (!got || std::abs(*got - *(truth.truth.*f.member)) > *(truth.tolerance.*f.member) + 1e-9) {
      r.fail(std::string(f.name) + " off after discarding");
    }
  }
  std::ostringstream note;
  note << "step_length_l " << raw.step_length_l.value_or(kMissing) << " -> " << clean.step_length_l.value_or(kMissing)
       << " m (truth " << *truth.truth.step_length_l << ")";
  return note.str();
}

// --- 7 ---------------------------------------------------------------------

std::vector<stats::RefValue> refs(const std::vector<double>& v) {
  std::vector<stats::RefValue> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(TrialRef::make("g", "p", "t" + std::to_string(i)), v[i]);
  return out;
}

std::string ac7_statistics(Report& r) {
  // Two curves 2 apart: s = sqrt(2), half-width = t(0.975, 1) * s / sqrt(2) = 12.706.
  NormalizedCurve a, b;
  a.values = {0.0, 5.0, -1.0};
  b.values = {2.0, 7.0, 1.0};
  const auto e = stats::ensemble_mean_ci({a, b});
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(e.ci_high[i] - e.mean[i] - kCiHalfWidth) > kCiTol) r.fail("CI half-width " + std::to_string(e.ci_high[i] - e.mean[i]));
    if (std::abs(e.mean[i] - e.ci_low[i] - kCiHalfWidth) > kCiTol) r.fail("CI lower half-width");
  }
  const auto b5 = stats::box_stats(refs({1, 2, 3, 4, 5}));
  if (!(b5.q1 == 2.0 && b5.median == 3.0 && b5.q3 == 4.0 && b5.whisker_low == 1.0 && b5.whisker_high == 5.0 &&
        b5.outliers.empty())) {
    r.fail("box {1..5}");
  }
  // h = (n-1)p quartiles 2.25 / 4.75, fences -1.5 / 8.5
  const auto b6 = stats::box_stats(refs({1, 2, 3, 4, 5, 100}));
  if (!(b6.q1 == 2.25 && b6.median == 3.5 && b6.q3 == 4.75 && b6.whisker_low == 1.0 && b6.whisker_high == 5.0 &&
        b6.outliers.size() == 1 && b6.outliers[0].second == 100.0)) {
    r.fail("box {1..5,100}");
  }
  std::ostringstream note;
  note << "half-width " << e.ci_high[0] - e.mean[0] << ", box quartiles exact";
  return note.str();
}

// --- 8 ---------------------------------------------------------------------

void add_group(const fs::path& root, const std::string& group, const std::vector<double>& speeds, double fx_offset,
               std::vector<TrialRef>& refs_out) {
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    synth::GaitConfig cfg;
    cfg.step_length_l = cfg.step_length_r = 0.6;
    cfg.set_speed(speeds[i]);
    cfg.fx_offset_n = fx_offset;
    cfg.cycles = 4;
    cfg.seed = 7 + i;
    cfg.blips = 2;
    const auto trial = synth::generate(cfg);
    store::TrialBundle b;
    b.ref = TrialRef::make(group, "p" + std::to_string(i + 1), "walk1");
    b.files.emplace(CanonicalKind::Motion, trial.motion);
    b.files.emplace(CanonicalKind::Grf, trial.grf);
    b.files.emplace(CanonicalKind::Events, features::detect_gait_events(trial.grf));
    b.meta.body_weight_n = trial.body_weight_n;
    store::save_trial(root, b);
    refs_out.push_back(b.ref);
  }
}

std::string ac8_ensembles(Report& r) {
  TempDir dir("gaitkit-accept");
  const auto t0 = Clock::now();
  const std::vector<double> normal{0.96, 0.98, 1.0, 1.02, 1.04};
  const std::vector<double> slow{0.56, 0.58, 0.6, 0.62, 0.64};
  std::vector<TrialRef> control, braking, fast, slowed;
  add_group(dir.path(), "control", normal, 0.0, control);
  add_group(dir.path(), "braking", normal, kOffsetN, braking);
  add_group(dir.path(), "fast", normal, 0.0, fast);
  add_group(dir.path(), "slow", slow, 0.0, slowed);
  const service::Api api(dir.path());

  // offset braking force: same gait, fx shifted by -20 N
  service::EnsembleRequest req;
  req.trials_a = control;
  req.trials_b = braking;
  req.variable = "grf.fx";
  req.cycle.mode = service::CycleSelection::Mode::All;
  std::size_t close = 0, points = 0;
  for (Side side : {Side::Left, Side::Right}) {
    req.side = side;
    const auto p = api.ensemble(req);
    for (std::size_t i = 0; i < p.group_a.mean.size(); ++i, ++points) {
      close += std::abs(p.group_b->mean[i] - p.group_a.mean[i] - kOffsetN) <= kOffsetTolN;
    }
  }
  const double share = static_cast<double>(close) / static_cast<double>(points);
  if (share < kOffsetPointShare) r.fail("offset reproduced at only " + std::to_string(share * 100.0) + "% of points");

  // speed 1.0 vs 0.6 m/s
  const auto st = api.spatiotemporal(fast, slowed);
  const auto& box = st.box.at("gait_speed");
  double gap = kMissing;
  if (!box.a || !box.b) {
    r.fail("gait_speed box missing");
  } else {
    gap = box.a->median - box.b->median;
    if (std::abs(gap - kSpeedGap) > kSpeedGapTol) r.fail("median speed gap " + std::to_string(gap));
  }
  const auto elapsed = Clock::now() - t0;
  if (std::chrono::duration<double>(elapsed).count() >= kEnsembleBudgetS) r.fail("took " + seconds(elapsed));
  std::ostringstream note;
  note << "fx offset within " << kOffsetTolN << " N at " << share * 100.0 << "% of points, median speed gap " << gap
       << " m/s, " << seconds(elapsed);
  return note.str();
}

// --- 9 ---------------------------------------------------------------------

std::string ac9_service(Report& r) {
  TempDir dir("gaitkit-accept");
  gaitkit::testing::write_fixture_store(dir.path());
  const service::Api api(dir.path());
  std::size_t routes = 0;
  for (const auto& c : gaitkit::testing::golden_cases()) {
    const auto want = slurp(fixture_dir() / "golden/service" / (c.name + ".txt"));
    if (want.empty() || gaitkit::testing::render(c.call(api)) != want) r.fail("golden mismatch: " + c.name);
    ++routes;
  }
  service::ServerConfig cfg;
  cfg.root = dir.path();
  cfg.port = 0;
  service::HttpServer server(cfg);
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);
  for (const auto& c : gaitkit::testing::golden_cases()) {
    httplib::Headers headers;
    if (c.name == "video_unsatisfiable") headers.emplace("Range", "bytes=2000-");
    const auto res = c.method == "GET" ? client.Get(c.path, headers) : client.Post(c.path, c.body, "application/json");
    const auto want = c.call(api);
    if (!res || res->status != want.status || res->body != want.body) r.fail("HTTP mismatch: " + c.name);
  }
  const auto bytes = gaitkit::testing::fixture_video_bytes();
  const auto part = client.Get("/api/video/healthy/h01/walk1", {{"Range", "bytes=0-99"}});
  if (!part || part->status != 206 || part->body != bytes.substr(0, 100) ||
      part->get_header_value("Content-Range") != "bytes 0-99/1000") {
    r.fail("206 partial content");
  }
  const auto full = client.Get("/api/video/healthy/h01/walk1");
  if (!full || full->status != 200 || full->body != bytes) r.fail("200 full body");
  const auto unsat = client.Get("/api/video/healthy/h01/walk1", {{"Range", "bytes=2000-"}});
  if (!unsat || unsat->status != 416) r.fail("416 unsatisfiable range");

  const std::string body = R"({"trials_a": ["healthy/h01/walk1", "healthy/h01/walk2", "healthy/h02/walk1"],
                               "trials_b": ["stroke/s01/walk1", "stroke/s02/walk1"], "variable": "grf.fx", "cycle": "all"})";
  std::vector<std::future<std::string>> replies;
  for (int i = 0; i < 8; ++i) {
    replies.push_back(std::async(std::launch::async, [&] {
      httplib::Client c("127.0.0.1", port);
      const auto res = c.Post("/api/ensemble", body, "application/json");
      return res ? res->body : std::string();
    }));
  }
  std::vector<std::string> got;
  for (auto& f : replies) got.push_back(f.get());
  for (const auto& g : got) {
    if (g.empty() || g != got.front()) r.fail("concurrent replies differ");
  }
  server.stop();
  return std::to_string(routes) + " golden route cases, Range 200/206/416, 8 concurrent replies identical";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string(Report&)>>> criteria = {
      {"AC1 format round-trips", ac1_round_trips},
      {"AC2 parser robustness", ac2_fuzz},
      {"AC3 filter correctness", ac3_filter},
      {"AC4 event detection", ac4_events},
      {"AC5 spatiotemporal oracle", ac5_spatiotemporal},
      {"AC6 negative step length replay", ac6_negative_step},
      {"AC7 statistics closed forms", ac7_statistics},
      {"AC8 group ensembles", ac8_ensembles},
      {"AC9 service contract", ac9_service},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Report report;
    std::string summary;
    try {
      summary = check(report);
    } catch (const std::exception& e) {
      report.fail(std::string("threw: ") + e.what());
    }
    std::cout << (report.ok() ? "PASS " : "FAIL ") << name << ": " << summary << '\n';
    for (const auto& n : report.notes) std::cout << "    " << n << '\n';
    failed += !report.ok();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
