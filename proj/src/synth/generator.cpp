#include "gaitkit/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gaitkit/core/error.hpp"
#include "gaitkit/formats/canonical_csv.hpp"

namespace gaitkit::synth {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHeelHeight = 0.05;
constexpr double kClearance = 0.08;
constexpr double kFootLength = 0.2;
constexpr double kSegment = 0.5;  // thigh and shank length
constexpr double kHipHeight = 0.95;
constexpr double kShoulderHeight = 1.45;
constexpr double kHalfContact = 0.15;
constexpr double kHalfRightLanding = 0.05;
constexpr double kHalfMargin = 0.08;
constexpr double kEdgeBlip = 0.07;
constexpr double kEdgeDropout = 0.12;

struct Plant {
  double td = 0.0;
  double to = 0.0;
  double x = 0.0;
  bool partial = false;
};

double ease(double s) { return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s); }

struct FootState {
  double x = 0.0;
  double z = kHeelHeight;
  double pitch = 0.0;  // radians, toe up positive
};

FootState foot_state(const std::vector<Plant>& plants, double t) {
  if (t < plants.front().td) return {plants.front().x, kHeelHeight + kClearance, 0.0};
  std::size_t i = 0;
  while (i + 1 < plants.size() && plants[i + 1].td <= t) ++i;
  const Plant& p = plants[i];
  if (t < p.to || i + 1 == plants.size()) return {p.x, kHeelHeight, 0.0};
  const Plant& q = plants[i + 1];
  const double s = (t - p.to) / (q.td - p.to);
  return {p.x + (q.x - p.x) * ease(s), kHeelHeight + kClearance * std::sin(kPi * s),
          0.35 * std::sin(kPi * s)};
}

// Sample indices that may fall in [begin, end), with one sample of slack.
std::pair<std::size_t, std::size_t> sample_range(double begin, double end, double rate,
                                                 std::size_t rows) {
  const double lo = std::clamp(std::floor(begin * rate) - 1.0, 0.0, static_cast<double>(rows));
  const double hi = std::clamp(std::ceil(end * rate) + 1.0, 0.0, static_cast<double>(rows));
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// Vertical force profile over one contact, tau in [0, 1).
double vertical_shape(double tau, bool partial) {
  if (partial) return 0.06 + 0.24 * std::sin(kPi * tau);
  return 0.06 + 1.2 * (std::sin(kPi * tau) + 0.3 * std::sin(3.0 * kPi * tau));
}

struct Generator {
  GaitConfig cfg;
  double T = 0.0;
  double t_lead = 0.0;
  double end = 0.0;
  std::vector<Plant> plants[2];  // left, right

  explicit Generator(const GaitConfig& c) : cfg(c) {
    T = cfg.cycle_time();
    const double phi = cfg.stance_fraction;
    // With a half landing the record opens on a right touchdown; the partial
    // left contact sits in the middle of the following left swing.
    t_lead = cfg.half_landing ? kHalfRightLanding + 0.5 * T : 0.6 * (1.0 - phi) * T;
    const double stride = cfg.step_length_l + cfg.step_length_r;
    const auto n = static_cast<int>(cfg.cycles);
    for (int k = -3; k <= n + 2; ++k) {
      const double tl = t_lead + k * T;
      plants[0].push_back({tl, tl + phi * T, k * stride, false});
      const double tr = tl + 0.5 * T;
      plants[1].push_back({tr, tr + phi * T, k * stride + cfg.step_length_r, false});
    }
    end = t_lead + n * T + 0.5 * phi * T;
    if (cfg.half_landing) {
      const double swing_start = t_lead - T + phi * T;
      const double start = swing_start + 0.5 * (t_lead - swing_start - kHalfContact);
      const double x_right = foot_state(plants[1], start).x;
      const double x_back = x_right - static_cast<double>(n) * cfg.step_length_l - 0.2;
      const Plant half{start, start + kHalfContact, x_back, true};
      auto at = std::upper_bound(plants[0].begin(), plants[0].end(), half,
                                 [](const Plant& a, const Plant& b) { return a.td < b.td; });
      plants[0].insert(at, half);
    }
  }

  double pelvis_x(double t) const {
    const double stride = cfg.step_length_l + cfg.step_length_r;
    return -0.5 * cfg.step_length_l + (t - t_lead) * stride / T;
  }

  std::vector<GaitEvent> events(bool include_partial) const {
    std::vector<GaitEvent> out;
    for (int s = 0; s < 2; ++s) {
      const Side side = s == 0 ? Side::Left : Side::Right;
      for (const auto& p : plants[s]) {
        if (p.td < 0.0 || p.td > end) continue;
        if (p.partial && !include_partial) continue;
        out.push_back({side, EventKind::Touchdown, p.td});
        if (p.to <= end) out.push_back({side, EventKind::Toeoff, p.to});
      }
    }
    return out;
  }
};

void check(const GaitConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(c.cadence >= 40.0 && c.cadence <= 200.0)) bad("cadence must lie in [40, 200] steps/min");
  if (!(c.step_length_l > 0.0) || !(c.step_length_r > 0.0)) bad("step lengths must be positive");
  if (!(c.step_width >= 0.0)) bad("step width must be non-negative");
  if (!(c.stance_fraction > 0.5 && c.stance_fraction < 1.0)) bad("stance fraction must lie in (0.5, 1)");
  if (!(c.body_weight_n > 0.0)) bad("body weight must be positive");
  if (c.cycles < 2 || c.cycles > 1000) bad("cycles must lie in [2, 1000]");
  if (!(c.motion_rate > 0.0) || !(c.grf_rate > 0.0)) bad("sample rates must be positive");
  const double T = c.cycle_time();
  if (0.6 * (1.0 - c.stance_fraction) * T < 0.06) bad("flight phase too short for event detection");
  if (c.half_landing && (1.0 - c.stance_fraction) * T < kHalfContact + 2.0 * kHalfMargin)
    bad("swing phase too short for a half landing");
}

}  // namespace

void GaitConfig::set_speed(double speed) {
  if (!(speed > 0.0)) throw Error(ErrorCode::InvalidArgument, "speed must be positive");
  cadence = 60.0 * speed / (0.5 * (step_length_l + step_length_r));
}

SynthTrial generate(const GaitConfig& config) {
  check(config);
  const Generator g(config);
  const GaitConfig& c = config;
  const double bw = c.body_weight_n;
  SynthTrial trial;
  trial.body_weight_n = bw;

  // motion
  {
    std::vector<Channel> channels;
    for (const char* role : {"SHO", "HIP", "KNE", "ANK", "HEE", "TOE"}) {
      for (const char* side : {"_L", "_R"}) {
        for (const char* axis : {"_x", "_y", "_z"}) {
          channels.push_back({std::string(role) + side + axis, Unit::Meter});
        }
      }
    }
    const auto rows = static_cast<std::size_t>(std::floor(g.end * c.motion_rate)) + 1;
    std::vector<std::vector<double>> data;
    data.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      const double t = static_cast<double>(i) / c.motion_rate;
      const double px = g.pelvis_x(t);
      Point3 pts[6][2];
      for (int s = 0; s < 2; ++s) {
        const double y = (s == 0 ? 0.5 : -0.5) * c.step_width;
        const FootState f = foot_state(g.plants[s], t);
        const double cp = std::cos(f.pitch), sp = std::sin(f.pitch);
        const Point3 heel{f.x, y, f.z};
        const Point3 toe{f.x + kFootLength * cp, y, f.z + kFootLength * sp};
        const Point3 ankle{f.x + 0.05 * cp - 0.07 * sp, y, f.z + 0.05 * sp + 0.07 * cp};
        const Point3 hip{px, (s == 0 ? 0.1 : -0.1), kHipHeight};
        // two-link chain with the knee in front of the hip-ankle line
        const double dx = ankle.x - hip.x, dz = ankle.z - hip.z;
        const double d = std::hypot(dx, dz);
        const double half = std::min(d / 2.0, kSegment);
        const double bulge = std::sqrt(std::max(0.0, kSegment * kSegment - half * half));
        const double ux = dx / d, uz = dz / d;
        const double nx = -uz, nz = ux;  // unit normal; flip so that it points forward
        const double sign = nx >= 0.0 ? 1.0 : -1.0;
        const Point3 knee{hip.x + ux * d / 2.0 + sign * nx * bulge, (hip.y + y) / 2.0,
                          hip.z + uz * d / 2.0 + sign * nz * bulge};
        const Point3 sho{px + 0.05, (s == 0 ? 0.18 : -0.18), kShoulderHeight};
        pts[0][s] = sho;
        pts[1][s] = hip;
        pts[2][s] = knee;
        pts[3][s] = ankle;
        pts[4][s] = heel;
        pts[5][s] = toe;
      }
      std::vector<double> row;
      row.reserve(channels.size());
      for (auto& role : pts) {
        for (auto& p : role) {
          row.push_back(p.x);
          row.push_back(p.y);
          row.push_back(p.z);
        }
      }
      data.push_back(std::move(row));
    }
    trial.motion = TimeSeriesTable(c.motion_rate, 0.0, std::move(channels), std::move(data));
  }

  // forces
  {
    const auto rows = static_cast<std::size_t>(std::floor(g.end * c.grf_rate)) + 1;
    std::vector<std::vector<double>> fz(2, std::vector<double>(rows, 0.0));
    std::vector<std::vector<double>> fx(2, std::vector<double>(rows, 0.0));
    std::vector<std::vector<double>> fy(2, std::vector<double>(rows, 0.0));
    const double ap_amplitude = 0.15 * bw * c.gait_speed();
    for (int s = 0; s < 2; ++s) {
      for (const auto& p : g.plants[s]) {
        const auto [first, last] = sample_range(p.td, p.to, c.grf_rate, rows);
        for (std::size_t i = first; i < last; ++i) {
          const double t = static_cast<double>(i) / c.grf_rate;
          if (t < p.td || t >= p.to) continue;
          const double tau = (t - p.td) / (p.to - p.td);
          const double scale = p.partial ? 0.25 : 1.0;
          fz[s][i] = bw * vertical_shape(tau, p.partial);
          fx[s][i] = -scale * ap_amplitude * std::sin(2.0 * kPi * tau);
          fy[s][i] = (s == 0 ? -1.0 : 1.0) * scale * 0.04 * bw * std::sin(kPi * tau);
        }
      }
    }

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> duration(0.010, 0.045);
    auto inject = [&](std::size_t count, bool in_contact, double edge, double value,
                      std::vector<Interval>& record) {
      std::vector<std::pair<int, Interval>> slots;
      for (int s = 0; s < 2; ++s) {
        const auto& ps = g.plants[s];
        for (std::size_t k = 0; k < ps.size(); ++k) {
          if (ps[k].partial) continue;
          Interval iv = in_contact ? Interval{ps[k].td, ps[k].to}
                                   : Interval{ps[k].to, k + 1 < ps.size() ? ps[k + 1].td : g.end};
          iv.begin = std::max(iv.begin, 0.0);
          iv.end = std::min(iv.end, g.end);
          if (iv.end - iv.begin >= 2.0 * edge + 0.045) slots.emplace_back(s, iv);
        }
      }
      std::shuffle(slots.begin(), slots.end(), rng);
      if (count > slots.size()) {
        throw Error(ErrorCode::InvalidArgument, "record too short for the requested injections");
      }
      for (std::size_t j = 0; j < count; ++j) {
        const auto [s, iv] = slots[j];
        const double len = duration(rng);
        std::uniform_real_distribution<double> start(iv.begin + edge, iv.end - edge - len);
        const double t0 = start(rng);
        const auto [first, last] = sample_range(t0, t0 + len, c.grf_rate, rows);
        for (std::size_t i = first; i < last; ++i) {
          const double t = static_cast<double>(i) / c.grf_rate;
          if (t >= t0 && t < t0 + len) fz[s][i] = value;
        }
        record.push_back({t0, t0 + len});
      }
    };
    inject(c.blips, false, kEdgeBlip, 0.5 * bw, trial.blips);
    inject(c.dropouts, true, kEdgeDropout, 0.0, trial.dropouts);

    std::vector<std::vector<double>> data(rows, std::vector<double>(6));
    for (std::size_t i = 0; i < rows; ++i) {
      data[i] = {fx[0][i] + c.fx_offset_n, fy[0][i], fz[0][i] + c.fz_offset_n,
                 fx[1][i] + c.fx_offset_n, fy[1][i], fz[1][i] + c.fz_offset_n};
    }
    std::vector<Channel> channels;
    for (const auto& name : formats::schema_channels(formats::CanonicalKind::Grf)) {
      channels.push_back({name, Unit::Newton});
    }
    trial.grf = TimeSeriesTable(c.grf_rate, 0.0, std::move(channels), std::move(data));
  }

  trial.events = make_events(g.events(true));
  trial.clean_events = make_events(g.events(false));

  const double T = g.T;
  const double phi = c.stance_fraction;
  const double stride = c.step_length_l + c.step_length_r;
  auto& t = trial.truth;
  t.step_length_l = c.step_length_l;
  t.step_length_r = c.step_length_r;
  t.stride_length = stride;
  t.step_width = c.step_width;
  t.gait_time = T;
  t.cadence = 120.0 / T;
  t.gait_speed = stride / T;
  t.stance_time_l = phi * T;
  t.stance_time_r = phi * T;
  t.swing_time_l = (1.0 - phi) * T;
  t.swing_time_r = (1.0 - phi) * T;
  t.double_support_time = 2.0 * (phi - 0.5) * T;

  // Heel positions are read between motion samples; right after touchdown the
  // previous sample may still catch the end of the swing.
  const double delta = 1.0 / c.grf_rate;
  const double swing = (1.0 - phi) * T;
  const double lag = std::min(1.0, 1.0 / (c.motion_rate * swing));
  const double spatial = std::max(c.step_length_l, c.step_length_r) * 2.0 * (1.0 - ease(1.0 - lag)) + 1e-9;
  auto& tol = trial.tolerance;
  tol.step_length_l = 2.0 * spatial;
  tol.step_length_r = 2.0 * spatial;
  tol.stride_length = 2.0 * spatial;
  tol.step_width = 1e-9;
  tol.gait_time = delta;
  tol.stance_time_l = delta;
  tol.stance_time_r = delta;
  tol.swing_time_l = 2.0 * delta;
  tol.swing_time_r = 2.0 * delta;
  tol.double_support_time = 2.0 * delta;
  tol.cadence = 120.0 / (T - delta) - 120.0 / T;
  tol.gait_speed = (stride + *tol.stride_length) / (T - delta) - stride / T;
  return trial;
}

}  // namespace gaitkit::synth
