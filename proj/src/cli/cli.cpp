#include "gaitkit/cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "gaitkit/core/error.hpp"
#include "gaitkit/features/angles.hpp"
#include "gaitkit/features/events.hpp"
#include "gaitkit/features/normalize.hpp"
#include "gaitkit/features/spatiotemporal.hpp"
#include "gaitkit/formats/axes.hpp"
#include "gaitkit/formats/c3d.hpp"
#include "gaitkit/formats/canonical_csv.hpp"
#include "gaitkit/formats/mat.hpp"
#include "gaitkit/formats/trc.hpp"
#include "gaitkit/service/server.hpp"
#include "gaitkit/signal/filter.hpp"
#include "gaitkit/signal/impute.hpp"
#include "gaitkit/signal/resample.hpp"
#include "gaitkit/store/store.hpp"
#include "gaitkit/synth/generator.hpp"

namespace gaitkit::cli {

namespace {

namespace fs = std::filesystem;
using formats::CanonicalKind;

[[noreturn]] void usage(const std::string& detail) { throw Error(ErrorCode::Usage, detail); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  const std::string text = read_text(path);
  return {text.begin(), text.end()};
}

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw Error(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

CanonicalKind kind_from_text(const std::string& text) {
  auto k = formats::parse_kind(text);
  if (!k) usage("unknown kind '" + text + "' (motion, grf, joint_angles, events, spatiotemporal)");
  return *k;
}

// `out` names a directory when it exists as one or ends in a separator.
fs::path output_path(const std::string& out, CanonicalKind kind) {
  const fs::path p(out);
  std::error_code ec;
  if (!out.empty() && (out.back() == '/' || fs::is_directory(p, ec))) return p / formats::file_name(kind);
  return p;
}

fs::path default_next_to(const std::string& input, const std::string& out, CanonicalKind kind) {
  if (!out.empty()) return output_path(out, kind);
  return fs::path(input).parent_path() / formats::file_name(kind);
}

char separator_from_text(const std::string& text) {
  if (text == "tab" || text == "\\t") return '\t';
  if (text == "space") return ' ';
  if (text.size() != 1) usage("separator must be one character, 'tab' or 'space'");
  return text[0];
}

void print_warnings(const Warnings& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

MarkerSet load_markers(const std::string& path) {
  if (path.empty()) return MarkerSet::standard();
  return MarkerSet::from_json(read_text(path));
}

TimeSeriesTable read_table(const std::string& path, CanonicalKind kind) {
  return formats::read_table_csv(read_text(path), kind);
}

// Turns a matrix with time in column 0 into a validated canonical table.
TimeSeriesTable matrix_to_table(const formats::NamedMatrix& m, CanonicalKind kind,
                                std::vector<std::string> columns) {
  if (columns.empty()) {
    if (kind == CanonicalKind::Motion) usage("motion matrices need --columns naming every column");
    columns.push_back("time");
    for (const auto& c : formats::schema_channels(kind)) columns.push_back(c);
  }
  if (columns.size() != m.cols) {
    throw Error(ErrorCode::SchemaMismatch, "matrix '" + m.name + "' has " + std::to_string(m.cols) +
                                               " columns, expected " + std::to_string(columns.size()));
  }
  std::string text;
  for (std::size_t c = 0; c < columns.size(); ++c) text += (c ? "," : "") + columns[c];
  text += '\n';
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) text += ',';
      const double v = m.at(r, c);
      if (std::isfinite(v)) text += formats::format_real(v);
    }
    text += '\n';
  }
  return formats::read_table_csv(text, kind);
}

struct ConvertOptions {
  std::string in, out, kind, var, columns, sep, axes;
};

int do_convert(const ConvertOptions& o, std::ostream& err) {
  const std::string ext = lower_extension(o.in);
  Warnings warnings;
  std::optional<CanonicalKind> kind;
  if (!o.kind.empty()) kind = kind_from_text(o.kind);
  formats::CanonicalData data;

  if (ext == ".c3d") {
    const auto bytes = read_bytes(o.in);
    auto capture = formats::parse_c3d(bytes, &warnings);
    if (!kind) kind = CanonicalKind::Motion;
    if (*kind == CanonicalKind::Motion) {
      data = capture.points;
    } else if (*kind == CanonicalKind::Grf) {
      data = capture.analog;
    } else {
      usage("C3D converts to motion or grf");
    }
  } else if (ext == ".trc") {
    if (kind && *kind != CanonicalKind::Motion) usage("TRC converts to motion only");
    kind = CanonicalKind::Motion;
    data = formats::parse_trc(read_text(o.in), &warnings);
  } else if (ext == ".mat") {
    if (!kind) usage("MAT conversion needs --kind");
    if (*kind == CanonicalKind::Events || *kind == CanonicalKind::Spatiotemporal) {
      usage("MAT converts to motion, grf or joint_angles");
    }
    const auto bytes = read_bytes(o.in);
    const auto matrices = formats::parse_mat(bytes, &warnings);
    const formats::NamedMatrix* chosen = nullptr;
    for (const auto& m : matrices) {
      if (o.var.empty() ? matrices.size() == 1 : m.name == o.var) chosen = &m;
    }
    if (chosen == nullptr) {
      if (o.var.empty()) usage("file holds " + std::to_string(matrices.size()) + " matrices; pick one with --var");
      throw Error(ErrorCode::SchemaMismatch, "no numeric matrix named '" + o.var + "'");
    }
    std::vector<std::string> columns;
    if (!o.columns.empty()) {
      std::stringstream ss(o.columns);
      for (std::string c; std::getline(ss, c, ',');) columns.push_back(c);
    }
    data = matrix_to_table(*chosen, *kind, columns);
  } else if (ext == ".csv" || ext == ".txt") {
    const std::string text = read_text(o.in);
    const char sep = o.sep.empty() ? (ext == ".txt" ? '\t' : ',') : separator_from_text(o.sep);
    if (kind && (*kind == CanonicalKind::Events || *kind == CanonicalKind::Spatiotemporal)) {
      data = formats::read_canonical_csv(text, *kind);
    } else {
      auto table = formats::read_delimited(text, sep, &warnings);
      if (!kind) {
        std::string header = "time";
        for (const auto& c : table.channels()) header += "," + c.name;
        kind = formats::detect_table_kind(header);
        if (!kind) usage("cannot tell the kind of '" + o.in + "'; pass --kind");
      }
      data = table;
    }
  } else {
    usage("unsupported input extension '" + ext + "' (.c3d, .trc, .mat, .csv, .txt)");
  }

  if (!o.axes.empty()) {
    auto* table = std::get_if<TimeSeriesTable>(&data);
    if (table == nullptr) usage("--axes applies to time-series kinds only");
    data = formats::remap_axes(*table, formats::parse_axis_map(o.axes));
  }
  print_warnings(warnings, err);
  write_text(output_path(o.out, *kind), formats::write_canonical_csv(data, *kind));
  return 0;
}

struct EventOptions {
  std::string grf, out, meta;
  double threshold = 10.0, min_contact = 0.1, min_flight = 0.05, fraction = 0.6;
  double body_weight = 0.0;
  bool discard_partial = false;
};

int do_events(const EventOptions& o) {
  features::EventDetectConfig cfg;
  cfg.threshold_n = o.threshold;
  cfg.min_contact_s = o.min_contact;
  cfg.min_flight_s = o.min_flight;
  cfg.partial_peak_fraction = o.fraction;
  if (o.body_weight > 0.0) cfg.body_weight_n = o.body_weight;
  if (!o.meta.empty() && !cfg.body_weight_n) {
    cfg.body_weight_n = store::TrialMeta::from_json(read_text(o.meta)).body_weight_n;
  }
  const auto grf = read_table(o.grf, CanonicalKind::Grf);
  auto events = features::detect_gait_events(grf, cfg);
  if (o.discard_partial) events = features::discard_partial_contacts(events, grf, cfg);
  write_text(default_next_to(o.grf, o.out, CanonicalKind::Events), formats::write_events_csv(events));
  return 0;
}

struct PrepOptions {
  std::string in, out, method = "linear", channels;
  double cutoff = 6.0, rate = 0.0;
  int order = 4, iterations = 10;
  std::uint64_t seed = 0;
  bool causal = false, shuffle = false;
};

struct NormalizeOptions {
  std::string in, events, channel, side = "left", out;
  std::size_t cycle = 0, points = kDefaultCyclePoints;
};

struct StoreOptions {
  std::string root, group, patient, trial;
  std::string motion, grf, angles, events, spatio, video, meta;
};

struct SynthOptions {
  std::string out;
  double cadence = 0.0, speed = 0.0, step = 0.0, step_l = 0.0, step_r = 0.0;
  synth::GaitConfig cfg;
};

int do_synth(SynthOptions o) {
  auto& cfg = o.cfg;
  if (o.step > 0.0) cfg.step_length_l = cfg.step_length_r = o.step;
  if (o.step_l > 0.0) cfg.step_length_l = o.step_l;
  if (o.step_r > 0.0) cfg.step_length_r = o.step_r;
  if (o.cadence > 0.0 && o.speed > 0.0) usage("give --cadence or --speed, not both");
  if (o.cadence > 0.0) cfg.cadence = o.cadence;
  if (o.speed > 0.0) cfg.set_speed(o.speed);
  const auto trial = synth::generate(cfg);
  const fs::path dir(o.out);
  write_text(dir / "motion.csv", formats::write_table_csv(trial.motion, CanonicalKind::Motion));
  write_text(dir / "grf.csv", formats::write_table_csv(trial.grf, CanonicalKind::Grf));
  store::TrialMeta meta;
  meta.body_weight_n = trial.body_weight_n;
  write_text(dir / "meta.json", meta.to_json());
  write_text(dir / "truth" / "events.csv", formats::write_events_csv(trial.events));
  write_text(dir / "truth" / "clean_events.csv", formats::write_events_csv(trial.clean_events));
  write_text(dir / "truth" / "spatiotemporal.csv", formats::write_spatiotemporal_csv(trial.truth));
  return 0;
}

int do_store_add(const StoreOptions& o) {
  store::TrialBundle bundle;
  bundle.ref = TrialRef::make(o.group, o.patient, o.trial);
  auto add = [&](const std::string& path, CanonicalKind kind) {
    if (path.empty()) return;
    const std::string text = read_text(path);
    try {
      bundle.files.emplace(kind, formats::read_canonical_csv(text, kind));
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationFailed, path + ": " + std::string(code_name(e.code())) + ": " + e.what());
    }
  };
  add(o.motion, CanonicalKind::Motion);
  add(o.grf, CanonicalKind::Grf);
  add(o.angles, CanonicalKind::JointAngles);
  add(o.events, CanonicalKind::Events);
  add(o.spatio, CanonicalKind::Spatiotemporal);
  if (!o.video.empty()) bundle.video = o.video;
  if (!o.meta.empty()) bundle.meta = store::TrialMeta::from_json(read_text(o.meta));
  store::save_trial(o.root, bundle);
  return 0;
}

int do_store_list(const std::string& root, std::ostream& out, std::ostream& err) {
  Warnings warnings;
  const auto tree = store::list_hierarchy(root, &warnings);
  print_warnings(warnings, err);
  for (const auto& [group, patients] : tree) {
    out << group << '\n';
    for (const auto& [patient, trials] : patients) {
      out << "  " << patient << '\n';
      for (const auto& t : trials) out << "    " << t << '\n';
    }
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gait data toolkit: format conversion, feature extraction, trial store and data service"};
  app.name(args.empty() ? "gaitkit" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  std::function<int()> action;

  // convert
  ConvertOptions conv;
  auto* convert = app.add_subcommand("convert", "Convert C3D/TRC/MAT/CSV/TXT into a canonical CSV file");
  convert->add_option("--in", conv.in, "Input file")->required();
  convert->add_option("--out", conv.out, "Output file or directory")->required();
  convert->add_option("--kind", conv.kind, "motion, grf, joint_angles, events or spatiotemporal");
  convert->add_option("--var", conv.var, "MAT variable to convert");
  convert->add_option("--columns", conv.columns, "Comma-separated column names of a MAT matrix (time first)");
  convert->add_option("--sep", conv.sep, "Separator of .csv/.txt input (character, 'tab' or 'space')");
  convert->add_option("--axes", conv.axes, "Axis map into x anterior / y left / z up, e.g. x,-z,y");
  convert->callback([&] { action = [&] { return do_convert(conv, err); }; });

  // extract
  auto* extract = app.add_subcommand("extract", "Derive joint angles, gait events or spatiotemporal parameters");
  extract->require_subcommand(1);
  std::string motion_in, markers_in, events_in, extract_out;
  auto* angles = extract->add_subcommand("angles", "Sagittal joint angles from marker trajectories");
  angles->add_option("--motion", motion_in, "Canonical motion CSV")->required();
  angles->add_option("--markers", markers_in, "JSON marker map (default ROLE_L/ROLE_R names)");
  angles->add_option("--out", extract_out, "Output path (default: joint_angles.csv next to the input)");
  angles->callback([&] {
    action = [&] {
      const auto motion = read_table(motion_in, CanonicalKind::Motion);
      const auto table = features::joint_angles_from_motion(motion, load_markers(markers_in));
      write_text(default_next_to(motion_in, extract_out, CanonicalKind::JointAngles),
                 formats::write_table_csv(table, CanonicalKind::JointAngles));
      return 0;
    };
  });
  EventOptions ev;
  auto* events = extract->add_subcommand("events", "Touchdown/toe-off events from vertical forces");
  events->add_option("--grf", ev.grf, "Canonical grf CSV")->required();
  events->add_option("--threshold", ev.threshold, "Contact threshold in N")->capture_default_str();
  events->add_option("--min-contact", ev.min_contact, "Shortest contact in s")->capture_default_str();
  events->add_option("--min-flight", ev.min_flight, "Shortest flight in s")->capture_default_str();
  events->add_flag("--discard-partial", ev.discard_partial, "Drop contacts peaking below --fraction x body weight");
  events->add_option("--fraction", ev.fraction, "Peak fraction of body weight for a full contact")->capture_default_str();
  events->add_option("--body-weight", ev.body_weight, "Body weight in N");
  events->add_option("--meta", ev.meta, "meta.json supplying body_weight_n");
  events->add_option("--out", ev.out, "Output path (default: events.csv next to the input)");
  events->callback([&] { action = [&] { return do_events(ev); }; });
  auto* spatio = extract->add_subcommand("spatio", "Spatiotemporal parameters from heel markers and events");
  spatio->add_option("--motion", motion_in, "Canonical motion CSV")->required();
  spatio->add_option("--events", events_in, "Canonical events CSV")->required();
  spatio->add_option("--markers", markers_in, "JSON marker map");
  spatio->add_option("--out", extract_out, "Output path (default: spatiotemporal.csv next to the motion file)");
  spatio->callback([&] {
    action = [&] {
      const auto motion = read_table(motion_in, CanonicalKind::Motion);
      const auto evs = formats::read_events_csv(read_text(events_in));
      const auto row = features::spatiotemporal_params(motion, load_markers(markers_in), evs);
      write_text(default_next_to(motion_in, extract_out, CanonicalKind::Spatiotemporal),
                 formats::write_spatiotemporal_csv(row));
      return 0;
    };
  });

  // prep
  PrepOptions prep;
  auto* prep_cmd = app.add_subcommand("prep", "Filter, impute or resample a time-series CSV");
  prep_cmd->require_subcommand(1);
  auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("--in", prep.in, "Input CSV (time first)")->required();
    cmd->add_option("--out", prep.out, "Output CSV")->required();
  };
  auto* filter = prep_cmd->add_subcommand("filter", "Butterworth low-pass");
  add_io(filter);
  filter->add_option("--cutoff", prep.cutoff, "Cutoff in Hz")->capture_default_str();
  filter->add_option("--order", prep.order, "Order of the one-pass filter (even)")->capture_default_str();
  filter->add_flag("--causal", prep.causal, "Single forward pass instead of zero-phase");
  filter->add_option("--channels", prep.channels, "Comma-separated channels (default: all)");
  filter->callback([&] {
    action = [&] {
      const auto table = formats::read_delimited(read_text(prep.in));
      std::vector<std::string> names;
      std::stringstream ss(prep.channels);
      for (std::string c; std::getline(ss, c, ',');) {
        if (!c.empty()) names.push_back(c);
      }
      const signal::FilterSpec spec{prep.cutoff, prep.order, !prep.causal};
      write_text(prep.out, formats::write_delimited(signal::lowpass_filter(table, spec, names)));
      return 0;
    };
  });
  auto* impute = prep_cmd->add_subcommand("impute", "Fill missing samples");
  add_io(impute);
  impute->add_option("--method", prep.method, "linear or chained")->capture_default_str();
  impute->add_option("--iterations", prep.iterations, "Chained-equation rounds")->capture_default_str();
  impute->add_option("--seed", prep.seed, "Seed for --shuffle")->capture_default_str();
  impute->add_flag("--shuffle", prep.shuffle, "Visit channels in seeded random order");
  impute->callback([&] {
    action = [&] {
      const auto table = formats::read_delimited(read_text(prep.in));
      TimeSeriesTable result;
      Warnings warnings;
      if (prep.method == "linear") {
        result = signal::impute_linear(table);
      } else if (prep.method == "chained") {
        result = signal::impute_chained(table, {prep.iterations, prep.seed, prep.shuffle}, &warnings);
      } else {
        usage("--method must be linear or chained");
      }
      print_warnings(warnings, err);
      write_text(prep.out, formats::write_delimited(result));
      return 0;
    };
  });
  auto* resample = prep_cmd->add_subcommand("resample", "Linear resampling onto a new rate");
  add_io(resample);
  resample->add_option("--rate", prep.rate, "Target rate in Hz")->required();
  resample->callback([&] {
    action = [&] {
      const auto table = formats::read_delimited(read_text(prep.in));
      write_text(prep.out, formats::write_delimited(signal::resample(table, prep.rate)));
      return 0;
    };
  });

  // normalize
  NormalizeOptions norm;
  auto* normalize = app.add_subcommand("normalize", "Resample one gait cycle onto a percent grid");
  normalize->add_option("--in", norm.in, "Time-series CSV")->required();
  normalize->add_option("--events", norm.events, "Canonical events CSV")->required();
  normalize->add_option("--channel", norm.channel, "Channel name")->required();
  normalize->add_option("--side", norm.side, "left or right")->capture_default_str();
  normalize->add_option("--cycle", norm.cycle, "Cycle index")->capture_default_str();
  normalize->add_option("--points", norm.points, "Grid points")->capture_default_str();
  normalize->add_option("--out", norm.out, "Output CSV (percent,value)")->required();
  normalize->callback([&] {
    action = [&] {
      const auto side = parse_side(norm.side);
      if (!side) usage("--side must be left or right");
      const auto table = formats::read_delimited(read_text(norm.in));
      const auto evs = formats::read_events_csv(read_text(norm.events));
      const auto curve = features::normalize_gait_cycle(table, norm.channel, evs, *side, norm.cycle, norm.points);
      std::string text = "percent,value\n";
      for (std::size_t i = 0; i < curve.values.size(); ++i) {
        const double pct = 100.0 * static_cast<double>(i) / static_cast<double>(curve.values.size() - 1);
        text += formats::format_real(pct) + "," + formats::format_real(curve.values[i]) + "\n";
      }
      write_text(norm.out, text);
      return 0;
    };
  });

  // store
  StoreOptions st;
  auto* store_cmd = app.add_subcommand("store", "Add trials to or list a trial store");
  store_cmd->require_subcommand(1);
  auto* add = store_cmd->add_subcommand("add", "Save canonical files as one trial (replaces an existing trial)");
  add->add_option("--root", st.root, "Store root directory")->required();
  add->add_option("--group", st.group, "Group id")->required();
  add->add_option("--patient", st.patient, "Patient id")->required();
  add->add_option("--trial", st.trial, "Trial id")->required();
  add->add_option("--motion", st.motion, "motion CSV");
  add->add_option("--grf", st.grf, "grf CSV");
  add->add_option("--angles", st.angles, "joint_angles CSV");
  add->add_option("--events", st.events, "events CSV");
  add->add_option("--spatio", st.spatio, "spatiotemporal CSV");
  add->add_option("--video", st.video, "Video file (stored as video.mp4)");
  add->add_option("--meta", st.meta, "meta.json");
  add->callback([&] { action = [&] { return do_store_add(st); }; });
  auto* list = store_cmd->add_subcommand("list", "Print the group/patient/trial tree");
  list->add_option("--root", st.root, "Store root directory")->required();
  list->callback([&] { action = [&] { return do_store_list(st.root, out, err); }; });

  // synth
  SynthOptions syn;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic walking trial with ground truth");
  synth_cmd->add_option("--out", syn.out, "Output directory")->required();
  synth_cmd->add_option("--cadence", syn.cadence, "Steps per minute (default 100)");
  synth_cmd->add_option("--speed", syn.speed, "Gait speed in m/s (sets the cadence)");
  synth_cmd->add_option("--step-length", syn.step, "Step length of both sides in m");
  synth_cmd->add_option("--step-length-l", syn.step_l, "Left step length in m");
  synth_cmd->add_option("--step-length-r", syn.step_r, "Right step length in m");
  synth_cmd->add_option("--width", syn.cfg.step_width, "Step width in m")->capture_default_str();
  synth_cmd->add_option("--stance", syn.cfg.stance_fraction, "Stance fraction of the cycle")->capture_default_str();
  synth_cmd->add_option("--cycles", syn.cfg.cycles, "Complete left cycles")->capture_default_str();
  synth_cmd->add_option("--body-weight", syn.cfg.body_weight_n, "Body weight in N")->capture_default_str();
  synth_cmd->add_option("--fx-offset", syn.cfg.fx_offset_n, "Constant added to fx in N")->capture_default_str();
  synth_cmd->add_option("--fz-offset", syn.cfg.fz_offset_n, "Constant added to fz in N")->capture_default_str();
  synth_cmd->add_option("--motion-rate", syn.cfg.motion_rate, "Marker rate in Hz")->capture_default_str();
  synth_cmd->add_option("--grf-rate", syn.cfg.grf_rate, "Force rate in Hz")->capture_default_str();
  synth_cmd->add_flag("--half-landing", syn.cfg.half_landing, "Prepend a partial left contact");
  synth_cmd->add_option("--blips", syn.cfg.blips, "Short force spikes during flight")->capture_default_str();
  synth_cmd->add_option("--dropouts", syn.cfg.dropouts, "Short force gaps during stance")->capture_default_str();
  synth_cmd->add_option("--seed", syn.cfg.seed, "Seed for injected artefacts")->capture_default_str();
  synth_cmd->callback([&] { action = [&] { return do_synth(syn); }; });

  // serve
  service::ServerConfig serve_cfg;
  std::string serve_root;
  auto* serve = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  serve->add_option("--root", serve_root, "Store root directory")->required();
  serve->add_option("--port", serve_cfg.port, "TCP port")->capture_default_str();
  serve->add_option("--host", serve_cfg.host, "Bind address")->capture_default_str();
  serve->add_option("--cors-origin", serve_cfg.cors_origin, "Access-Control-Allow-Origin value")->capture_default_str();
  serve->callback([&] {
    action = [&] {
      serve_cfg.root = serve_root;
      if (!fs::is_directory(serve_root)) {
        throw Error(ErrorCode::IoFailure, "store root '" + serve_root + "' is not a directory");
      }
      service::HttpServer server(serve_cfg);
      out << "serving " << serve_root << " on http://" << serve_cfg.host << ":" << serve_cfg.port << std::endl;
      server.run();
      return 0;
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("gaitkit");
  if (argv.size() > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: usage: unknown command '" << argv[1] << "'\n";
    return 1;
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::Normal);
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // --help on a subcommand surfaces here with the subcommand's own text.
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "error: usage: " << e.what() << '\n';
    return 1;
  }

  try {
    return action ? action() : 1;
  } catch (const Error& e) {
    err << "error: " << code_name(e.code()) << ": " << e.what() << '\n';
    switch (category_of(e.code())) {
      case ErrorCategory::Usage: return 1;
      case ErrorCategory::Data: return 2;
      case ErrorCategory::Io: return 3;
    }
    return 2;
  } catch (const std::exception& e) {
    err << "error: io_failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace gaitkit::cli
