#include "gaitkit/formats/c3d.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <set>

namespace gaitkit::formats {

namespace {

constexpr std::size_t kBlock = 512;
constexpr std::uint8_t kMagic = 0x50;
constexpr std::uint8_t kIntel = 84;

// ---------------------------------------------------------------------------
// Bounded little-endian reads

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t size() const noexcept { return bytes_.size(); }

  bool fits(std::size_t pos, std::size_t len) const noexcept {
    return pos <= bytes_.size() && len <= bytes_.size() - pos;
  }

  std::uint8_t u8(std::size_t pos, ErrorCode code) const {
    need(pos, 1, code);
    return bytes_[pos];
  }
  std::int8_t i8(std::size_t pos, ErrorCode code) const {
    return static_cast<std::int8_t>(u8(pos, code));
  }
  std::uint16_t u16(std::size_t pos, ErrorCode code) const {
    need(pos, 2, code);
    return static_cast<std::uint16_t>(bytes_[pos] | (bytes_[pos + 1] << 8));
  }
  std::int16_t i16(std::size_t pos, ErrorCode code) const {
    return static_cast<std::int16_t>(u16(pos, code));
  }
  std::uint32_t u32(std::size_t pos, ErrorCode code) const {
    need(pos, 4, code);
    return static_cast<std::uint32_t>(bytes_[pos]) | (static_cast<std::uint32_t>(bytes_[pos + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes_[pos + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes_[pos + 3]) << 24);
  }
  float f32(std::size_t pos, ErrorCode code) const { return std::bit_cast<float>(u32(pos, code)); }

  std::span<const std::uint8_t> slice(std::size_t pos, std::size_t len, ErrorCode code) const {
    need(pos, len, code);
    return bytes_.subspan(pos, len);
  }

 private:
  void need(std::size_t pos, std::size_t len, ErrorCode code) const {
    if (!fits(pos, len)) {
      throw Error(code, "read of " + std::to_string(len) + " bytes at offset " +
                            std::to_string(pos) + " exceeds file size " +
                            std::to_string(bytes_.size()));
    }
  }

  std::span<const std::uint8_t> bytes_;
};

// ---------------------------------------------------------------------------
// Parameter section

struct Param {
  std::int8_t type = 0;  // -1 char, 1 byte, 2 int16, 4 float
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> data;

  std::size_t count() const {
    // Saturates so that hostile dimension lists cannot wrap around.
    constexpr std::size_t kCap = std::size_t{1} << 40;
    std::size_t n = 1;
    for (auto d : dims) {
      n *= d;
      if (n > kCap) return kCap;
    }
    return n;
  }
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

class ParameterSet {
 public:
  const Param* get(const std::string& group, const std::string& name) const {
    auto it = params_.find({upper(group), upper(name)});
    return it == params_.end() ? nullptr : &it->second;
  }

  void add(const std::string& group, const std::string& name, Param p) {
    params_[{upper(group), upper(name)}] = std::move(p);
  }

  std::optional<double> number(const std::string& group, const std::string& name,
                               std::size_t index = 0) const {
    const auto* p = get(group, name);
    if (p == nullptr || index >= p->count()) return std::nullopt;
    const auto width = static_cast<std::size_t>(std::abs(p->type));
    const auto off = index * width;
    if (off + width > p->data.size()) return std::nullopt;
    const auto* d = p->data.data() + off;
    switch (p->type) {
      case 1: return static_cast<double>(static_cast<std::int8_t>(d[0]));
      case 2: return static_cast<double>(static_cast<std::int16_t>(d[0] | (d[1] << 8)));
      case 4: {
        std::uint32_t raw = static_cast<std::uint32_t>(d[0]) | (static_cast<std::uint32_t>(d[1]) << 8) |
                            (static_cast<std::uint32_t>(d[2]) << 16) |
                            (static_cast<std::uint32_t>(d[3]) << 24);
        return static_cast<double>(std::bit_cast<float>(raw));
      }
      default: return std::nullopt;
    }
  }

  std::vector<double> numbers(const std::string& group, const std::string& name) const {
    std::vector<double> out;
    const auto* p = get(group, name);
    if (p == nullptr || p->type == -1) return out;
    for (std::size_t i = 0; i < p->count(); ++i) {
      auto v = number(group, name, i);
      if (!v) break;
      out.push_back(*v);
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& group, const std::string& name) const {
    std::vector<std::string> out;
    const auto* p = get(group, name);
    if (p == nullptr || p->type != -1) return out;
    const std::string all(p->data.begin(), p->data.end());
    if (p->dims.empty()) {
      out.push_back(rtrim(all));
      return out;
    }
    const auto len = p->dims[0];
    if (len == 0) return out;
    const auto n = p->count() / len;
    for (std::size_t i = 0; i < n && (i + 1) * len <= all.size(); ++i) {
      out.push_back(rtrim(all.substr(i * len, len)));
    }
    return out;
  }

 private:
  std::map<std::pair<std::string, std::string>, Param> params_;
};

ParameterSet read_parameters(const Reader& r, std::size_t start) {
  constexpr auto bad = ErrorCode::ParameterCorrupt;
  // Parameter blocks may legitimately be truncated at end-of-file by some
  // writers; the walk is bounded by whichever ends first.
  const std::size_t declared_blocks = r.u8(start + 2, bad);
  const std::size_t limit = std::min(r.size(), start + std::max<std::size_t>(declared_blocks, 1) * kBlock);

  std::map<int, std::string> group_names;
  struct Pending {
    int group_id;
    std::string name;
    Param param;
  };
  std::vector<Pending> pending;

  std::size_t pos = start + 4;
  while (pos < limit) {
    const int nchars = std::abs(static_cast<int>(r.i8(pos, bad)));
    if (nchars == 0) break;
    const int id = r.i8(pos + 1, bad);
    const auto name_bytes = r.slice(pos + 2, static_cast<std::size_t>(nchars), bad);
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::size_t offset_pos = pos + 2 + static_cast<std::size_t>(nchars);
    const auto offset = r.u16(offset_pos, bad);
    const std::size_t next = offset_pos + offset;
    std::size_t cur = offset_pos + 2;
    if (offset_pos + 2 > limit) throw Error(bad, "parameter record overruns parameter section");

    if (id < 0) {
      group_names[-id] = rtrim(name);
    } else if (id > 0) {
      Param p;
      p.type = r.i8(cur, bad);
      if (p.type != -1 && p.type != 1 && p.type != 2 && p.type != 4) {
        throw Error(bad, "parameter '" + name + "' has invalid type " + std::to_string(p.type));
      }
      const std::size_t ndims = r.u8(cur + 1, bad);
      cur += 2;
      for (std::size_t d = 0; d < ndims; ++d) p.dims.push_back(r.u8(cur + d, bad));
      cur += ndims;
      const std::size_t bytes = p.count() * static_cast<std::size_t>(std::abs(p.type));
      if (cur + bytes > limit) {
        throw Error(bad, "parameter '" + name + "' data overruns parameter section");
      }
      auto data = r.slice(cur, bytes, bad);
      p.data.assign(data.begin(), data.end());
      pending.push_back({id, rtrim(name), std::move(p)});
    }

    if (offset == 0) break;
    if (next <= pos || next > limit) {
      throw Error(bad, "parameter chain offset at " + std::to_string(offset_pos) +
                           " points outside the parameter section");
    }
    pos = next;
  }

  ParameterSet set;
  for (auto& p : pending) {
    auto it = group_names.find(p.group_id);
    if (it != group_names.end()) set.add(it->second, p.name, std::move(p.param));
  }
  return set;
}

double unit_scale(const std::string& units, Warnings* warnings) {
  const auto u = upper(units);
  if (u.empty() || u == "MM") return 0.001;
  if (u == "M") return 1.0;
  if (u == "CM") return 0.01;
  warn(warnings, "unknown POINT:UNITS '" + units + "', assuming millimetres");
  return 0.001;
}

Unit analog_unit(const std::string& text, Warnings* warnings) {
  if (text == "N") return Unit::Newton;
  if (text == "V") return Unit::Volt;
  if (text == "m") return Unit::Meter;
  if (text == "deg") return Unit::Degree;
  if (!text.empty()) warn(warnings, "analog unit '" + text + "' imported as unitless");
  return Unit::Unitless;
}

/// Non-empty, unique labels; blanks and repeats get a positional name.
std::vector<std::string> clean_labels(std::vector<std::string> labels, std::size_t n,
                                      const std::string& stem, Warnings* warnings) {
  labels.resize(std::min(labels.size(), n));
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= labels.size()) labels.emplace_back();
    auto& l = labels[i];
    if (l.empty() || seen.count(l) > 0) {
      std::string replacement = stem + std::to_string(i + 1);
      warn(warnings, "label '" + l + "' at index " + std::to_string(i) + " replaced by '" +
                         replacement + "'");
      l = replacement;
    }
    seen.insert(l);
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Writer helpers

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_f32(std::vector<std::uint8_t>& out, float f) {
  const auto v = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}
void set_u16(std::vector<std::uint8_t>& out, std::size_t pos, std::uint16_t v) {
  out[pos] = static_cast<std::uint8_t>(v & 0xff);
  out[pos + 1] = static_cast<std::uint8_t>(v >> 8);
}
void set_f32(std::vector<std::uint8_t>& out, std::size_t pos, float f) {
  const auto v = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out[pos + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
}

class ParamWriter {
 public:
  void group(std::int8_t id, const std::string& name) {
    const auto start = begin_record(static_cast<std::int8_t>(-id), name);
    put_u8(buf_, 0);  // description length
    finish_record(start);
  }

  void int16s(std::int8_t gid, const std::string& name, const std::vector<std::int16_t>& values,
              bool scalar = false) {
    const auto start = begin_record(gid, name);
    put_u8(buf_, 2);
    if (scalar) {
      put_u8(buf_, 0);
    } else {
      put_u8(buf_, 1);
      put_u8(buf_, static_cast<std::uint8_t>(values.size()));
    }
    for (auto v : values) put_u16(buf_, static_cast<std::uint16_t>(v));
    put_u8(buf_, 0);
    finish_record(start);
  }

  void floats(std::int8_t gid, const std::string& name, const std::vector<float>& values,
              bool scalar = false) {
    const auto start = begin_record(gid, name);
    put_u8(buf_, 4);
    if (scalar) {
      put_u8(buf_, 0);
    } else {
      put_u8(buf_, 1);
      put_u8(buf_, static_cast<std::uint8_t>(values.size()));
    }
    for (auto v : values) put_f32(buf_, v);
    put_u8(buf_, 0);
    finish_record(start);
  }

  void strings(std::int8_t gid, const std::string& name, const std::vector<std::string>& values) {
    std::size_t len = 1;
    for (const auto& v : values) len = std::max(len, v.size());
    if (len > 255) throw Error(ErrorCode::CapacityExceeded, "label longer than 255 characters");
    const auto start = begin_record(gid, name);
    put_u8(buf_, static_cast<std::uint8_t>(0xff));  // -1: char
    put_u8(buf_, 2);
    put_u8(buf_, static_cast<std::uint8_t>(len));
    put_u8(buf_, static_cast<std::uint8_t>(values.size()));
    for (const auto& v : values) {
      for (std::size_t i = 0; i < len; ++i) {
        buf_.push_back(static_cast<std::uint8_t>(i < v.size() ? v[i] : ' '));
      }
    }
    put_u8(buf_, 0);
    finish_record(start);
  }

  /// Terminates the chain and returns the section body (without the 4-byte prefix).
  std::vector<std::uint8_t> finish() {
    if (last_offset_pos_) set_u16(buf_, *last_offset_pos_, 0);
    return buf_;
  }

 private:
  std::size_t begin_record(std::int8_t id, const std::string& name) {
    const auto start = buf_.size();
    put_u8(buf_, static_cast<std::uint8_t>(name.size()));
    put_u8(buf_, static_cast<std::uint8_t>(id));
    buf_.insert(buf_.end(), name.begin(), name.end());
    last_offset_pos_ = buf_.size();
    put_u16(buf_, 0);
    return start;
  }

  void finish_record(std::size_t /*start*/) {
    const auto offset = buf_.size() - *last_offset_pos_;
    if (offset > 0x7fff) throw Error(ErrorCode::CapacityExceeded, "parameter record too large");
    set_u16(buf_, *last_offset_pos_, static_cast<std::uint16_t>(offset));
  }

  std::vector<std::uint8_t> buf_;
  std::optional<std::size_t> last_offset_pos_;
};

}  // namespace

RawCapture parse_c3d(std::span<const std::uint8_t> bytes, Warnings* warnings) {
  const Reader r(bytes);
  if (bytes.size() < kBlock) {
    throw Error(ErrorCode::TruncatedData,
                "C3D input is " + std::to_string(bytes.size()) + " bytes, header needs 512");
  }
  if (bytes[1] != kMagic) {
    throw Error(ErrorCode::MagicMismatch, "byte 2 is not 0x50; not a C3D file");
  }
  const std::size_t param_block = bytes[0];
  if (param_block == 0) throw Error(ErrorCode::ParameterCorrupt, "parameter block number is 0");
  const std::size_t param_start = (param_block - 1) * kBlock;
  constexpr auto pc = ErrorCode::ParameterCorrupt;
  const auto processor = r.u8(param_start + 3, pc);
  if (processor != kIntel) {
    throw Error(ErrorCode::UnsupportedProcessor,
                "processor type " + std::to_string(processor) + " is not Intel (84)");
  }
  const auto params = read_parameters(r, param_start);

  constexpr auto td = ErrorCode::TruncatedData;
  const std::size_t n_points = r.u16(2, td);
  const std::size_t analog_total = r.u16(4, td);
  const std::size_t first_frame = r.u16(6, td);
  const std::size_t last_frame = r.u16(8, td);
  const float header_scale = r.f32(12, td);
  const std::size_t data_block = r.u16(16, td);
  std::size_t analog_factor = r.u16(18, td);
  const float header_rate = r.f32(20, td);

  double rate = params.number("POINT", "RATE").value_or(header_rate);
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorCode::ParameterCorrupt, "frame rate is not positive");
  }
  const double scale = params.number("POINT", "SCALE").value_or(header_scale);
  if (!std::isfinite(scale)) throw Error(ErrorCode::ParameterCorrupt, "POINT:SCALE is not finite");
  const bool is_float = scale < 0.0;
  const double int_scale = std::abs(scale);

  const std::size_t frames = last_frame >= first_frame && first_frame > 0
                                 ? last_frame - first_frame + 1
                                 : 0;
  std::size_t n_analog = 0;
  if (analog_factor == 0) {
    if (analog_total != 0) throw Error(ErrorCode::ParameterCorrupt, "analog samples per frame is 0");
    analog_factor = 1;
  } else {
    if (analog_total % analog_factor != 0) {
      throw Error(ErrorCode::ParameterCorrupt,
                  "analog measurements are not a multiple of samples per frame");
    }
    n_analog = analog_total / analog_factor;
  }

  if (data_block == 0) throw Error(ErrorCode::ParameterCorrupt, "data block number is 0");
  const std::size_t data_start = (data_block - 1) * kBlock;
  const std::size_t word = is_float ? 4 : 2;
  const std::size_t frame_words = n_points * 4 + analog_total;
  // 64-bit arithmetic: all operands are bounded by 16-bit header fields.
  const std::uint64_t needed = static_cast<std::uint64_t>(frames) * frame_words * word;
  if (data_start > bytes.size() || needed > bytes.size() - data_start) {
    throw Error(ErrorCode::TruncatedData,
                "header declares " + std::to_string(frames) + " frames (" + std::to_string(needed) +
                    " bytes) beyond end of file");
  }

  const double to_meters = unit_scale(
      [&] {
        auto u = params.strings("POINT", "UNITS");
        return u.empty() ? std::string() : u.front();
      }(),
      warnings);

  auto point_labels = clean_labels(params.strings("POINT", "LABELS"), n_points, "POINT", warnings);
  auto analog_labels =
      clean_labels(params.strings("ANALOG", "LABELS"), n_analog, "ANALOG", warnings);

  const double gen_scale = params.number("ANALOG", "GEN_SCALE").value_or(1.0);
  auto analog_scale = params.numbers("ANALOG", "SCALE");
  auto analog_offset = params.numbers("ANALOG", "OFFSET");
  auto analog_units = params.strings("ANALOG", "UNITS");
  if (n_analog > 0 && (analog_scale.size() < n_analog || analog_offset.size() < n_analog)) {
    warn(warnings, "ANALOG:SCALE/OFFSET shorter than channel count; defaults 1/0 used");
  }
  analog_scale.resize(std::max(analog_scale.size(), n_analog), 1.0);
  analog_offset.resize(std::max(analog_offset.size(), n_analog), 0.0);

  std::vector<Channel> point_channels;
  for (const auto& l : point_labels) {
    for (const char* axis : {"_x", "_y", "_z"}) point_channels.push_back({l + axis, Unit::Meter});
  }
  std::vector<Channel> analog_channels;
  for (std::size_t i = 0; i < n_analog; ++i) {
    analog_channels.push_back(
        {analog_labels[i], analog_unit(i < analog_units.size() ? analog_units[i] : "", warnings)});
  }

  std::vector<std::vector<double>> point_rows;
  std::vector<std::vector<double>> analog_rows;
  point_rows.reserve(frames);
  if (n_analog > 0) analog_rows.reserve(frames * analog_factor);

  auto read_word = [&](std::size_t pos) -> double {
    return is_float ? static_cast<double>(r.f32(pos, td)) : static_cast<double>(r.i16(pos, td));
  };

  std::size_t pos = data_start;
  for (std::size_t f = 0; f < frames; ++f) {
    std::vector<double> row(n_points * 3);
    for (std::size_t p = 0; p < n_points; ++p) {
      const double x = read_word(pos);
      const double y = read_word(pos + word);
      const double z = read_word(pos + 2 * word);
      const double residual = read_word(pos + 3 * word);
      pos += 4 * word;
      if (residual < 0.0) {
        row[3 * p] = row[3 * p + 1] = row[3 * p + 2] = kMissing;
        continue;
      }
      const double k = (is_float ? 1.0 : int_scale) * to_meters;
      row[3 * p] = x * k;
      row[3 * p + 1] = y * k;
      row[3 * p + 2] = z * k;
    }
    point_rows.push_back(std::move(row));
    for (std::size_t s = 0; s < analog_factor && n_analog > 0; ++s) {
      std::vector<double> arow(n_analog);
      for (std::size_t c = 0; c < n_analog; ++c) {
        const double raw = read_word(pos);
        pos += word;
        arow[c] = (raw - analog_offset[c]) * gen_scale * analog_scale[c];
      }
      analog_rows.push_back(std::move(arow));
    }
  }

  const double start_time = first_frame > 0 ? static_cast<double>(first_frame - 1) / rate : 0.0;
  const double analog_rate =
      params.number("ANALOG", "RATE").value_or(rate * static_cast<double>(analog_factor));
  RawCapture out;
  out.points = TimeSeriesTable(rate, start_time, std::move(point_channels), std::move(point_rows));
  out.analog = TimeSeriesTable(analog_rate > 0.0 ? analog_rate : rate * analog_factor, start_time,
                               std::move(analog_channels), std::move(analog_rows));
  out.point_labels = std::move(point_labels);
  out.analog_labels = std::move(analog_labels);
  return out;
}

std::vector<std::uint8_t> write_c3d(const RawCapture& capture) {
  const auto& pts = capture.points;
  const auto& ana = capture.analog;
  const std::size_t frames = pts.row_count();
  const std::size_t n_points = capture.point_labels.size();
  const std::size_t n_analog = capture.analog_labels.size();

  if (frames > 65535) {
    throw Error(ErrorCode::CapacityExceeded,
                std::to_string(frames) + " frames exceed the 65535-frame C3D header limit");
  }
  if (n_points > 255) throw Error(ErrorCode::CapacityExceeded, "more than 255 markers");
  if (n_analog > 255) throw Error(ErrorCode::CapacityExceeded, "more than 255 analog channels");
  if (pts.channel_count() != 3 * n_points) {
    throw Error(ErrorCode::InvalidArgument, "point table does not hold 3 channels per label");
  }
  if (ana.channel_count() != n_analog) {
    throw Error(ErrorCode::InvalidArgument, "analog table does not match analog labels");
  }
  std::size_t factor = 1;
  if (n_analog > 0) {
    const double ratio = ana.sample_rate() / pts.sample_rate();
    factor = static_cast<std::size_t>(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9 * ratio) {
      throw Error(ErrorCode::InvalidArgument,
                  "analog rate must be an integer multiple of the point rate");
    }
    if (ana.row_count() != frames * factor) {
      throw Error(ErrorCode::InvalidArgument, "analog row count must be frames x samples-per-frame");
    }
  }
  if (n_analog * factor > 65535) {
    throw Error(ErrorCode::CapacityExceeded, "analog samples per frame exceed 65535");
  }
  const double first = std::round(pts.start_time() * pts.sample_rate()) + 1.0;
  if (first < 1.0 || first + static_cast<double>(frames) - 1.0 > 65535.0) {
    throw Error(ErrorCode::CapacityExceeded, "start time does not fit the 16-bit frame index");
  }
  const auto first_frame = static_cast<std::uint16_t>(first);
  const auto last_frame = static_cast<std::uint16_t>(first_frame + frames - 1);

  ParamWriter pw;
  pw.group(1, "POINT");
  pw.int16s(1, "USED", {static_cast<std::int16_t>(n_points)}, true);
  pw.floats(1, "SCALE", {-1.0f}, true);
  pw.floats(1, "RATE", {static_cast<float>(pts.sample_rate())}, true);
  pw.int16s(1, "FRAMES", {static_cast<std::int16_t>(static_cast<std::uint16_t>(frames))}, true);
  pw.strings(1, "UNITS", {"m"});
  pw.strings(1, "LABELS", capture.point_labels);
  pw.group(2, "ANALOG");
  pw.int16s(2, "USED", {static_cast<std::int16_t>(n_analog)}, true);
  pw.floats(2, "GEN_SCALE", {1.0f}, true);
  pw.floats(2, "RATE", {static_cast<float>(pts.sample_rate() * static_cast<double>(factor))}, true);
  pw.strings(2, "LABELS", capture.analog_labels);
  pw.floats(2, "SCALE", std::vector<float>(n_analog, 1.0f));
  pw.int16s(2, "OFFSET", std::vector<std::int16_t>(n_analog, 0));
  std::vector<std::string> units;
  for (const auto& ch : ana.channels()) units.emplace_back(unit_name(ch.unit));
  pw.strings(2, "UNITS", units);
  auto body = pw.finish();

  const std::size_t param_bytes = 4 + body.size() + 1;  // trailing zero terminator byte
  const std::size_t param_blocks = (param_bytes + kBlock - 1) / kBlock;
  if (param_blocks > 255) throw Error(ErrorCode::CapacityExceeded, "parameter section too large");
  const std::size_t data_block = 2 + param_blocks;

  std::vector<std::uint8_t> out(kBlock, 0);
  out[0] = 2;
  out[1] = kMagic;
  set_u16(out, 2, static_cast<std::uint16_t>(n_points));
  set_u16(out, 4, static_cast<std::uint16_t>(n_analog * factor));
  set_u16(out, 6, first_frame);
  set_u16(out, 8, frames == 0 ? static_cast<std::uint16_t>(first_frame - 1) : last_frame);
  set_u16(out, 10, 0);
  set_f32(out, 12, -1.0f);
  set_u16(out, 16, static_cast<std::uint16_t>(data_block));
  set_u16(out, 18, static_cast<std::uint16_t>(n_analog > 0 ? factor : 0));
  set_f32(out, 20, static_cast<float>(pts.sample_rate()));

  out.push_back(0);
  out.push_back(kMagic);
  out.push_back(static_cast<std::uint8_t>(param_blocks));
  out.push_back(kIntel);
  out.insert(out.end(), body.begin(), body.end());
  out.resize(kBlock * (1 + param_blocks), 0);

  for (std::size_t f = 0; f < frames; ++f) {
    const auto& row = pts.rows()[f];
    for (std::size_t p = 0; p < n_points; ++p) {
      const double x = row[3 * p], y = row[3 * p + 1], z = row[3 * p + 2];
      if (is_missing(x) || is_missing(y) || is_missing(z)) {
        for (int k = 0; k < 3; ++k) put_f32(out, 0.0f);
        put_f32(out, -1.0f);
      } else {
        put_f32(out, static_cast<float>(x));
        put_f32(out, static_cast<float>(y));
        put_f32(out, static_cast<float>(z));
        put_f32(out, 0.0f);
      }
    }
    for (std::size_t s = 0; s < factor && n_analog > 0; ++s) {
      const auto& arow = ana.rows()[f * factor + s];
      for (std::size_t c = 0; c < n_analog; ++c) put_f32(out, static_cast<float>(arow[c]));
    }
  }
  const std::size_t blocks = std::max<std::size_t>((out.size() + kBlock - 1) / kBlock, data_block);
  out.resize(blocks * kBlock, 0);
  return out;
}

}  // namespace gaitkit::formats
