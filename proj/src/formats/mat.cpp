#include "gaitkit/formats/mat.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <limits>
#include <cstring>
#include <optional>
#include <string_view>

namespace gaitkit::formats {

namespace {

constexpr std::size_t kHeaderSize = 128;
// Upper bound on inflated element size; guards against decompression bombs.
constexpr std::size_t kMaxInflated = std::size_t{512} << 20;

enum DataType : std::uint32_t {
  miINT8 = 1,
  miUINT8 = 2,
  miINT16 = 3,
  miUINT16 = 4,
  miINT32 = 5,
  miUINT32 = 6,
  miSINGLE = 7,
  miDOUBLE = 9,
  miINT64 = 12,
  miUINT64 = 13,
  miMATRIX = 14,
  miCOMPRESSED = 15,
};

enum ArrayClass : std::uint32_t {
  mxCELL = 1,
  mxSTRUCT = 2,
  mxOBJECT = 3,
  mxCHAR = 4,
  mxSPARSE = 5,
  mxDOUBLE = 6,
  mxSINGLE = 7,
};

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::ElementCorrupt, "MAT element: " + what);
}

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(load_u32(p)) |
         (static_cast<std::uint64_t>(load_u32(p + 4)) << 32);
}

struct Element {
  std::uint32_t type = 0;
  std::span<const std::uint8_t> data;
};

/// Sequential element reader over a bounded buffer.
class ElementStream {
 public:
  explicit ElementStream(std::span<const std::uint8_t> buf) : buf_(buf) {}

  bool done() const { return buf_.size() - pos_ < 8; }

  Element next() {
    if (done()) corrupt("truncated tag");
    const std::uint32_t word = load_u32(buf_.data() + pos_);
    Element e;
    if ((word >> 16) != 0) {
      // small data element: size in upper half, payload in the tag's second word
      const std::size_t n = word >> 16;
      if (n > 4) corrupt("small element larger than 4 bytes");
      e.type = word & 0xffff;
      e.data = buf_.subspan(pos_ + 4, n);
      pos_ += 8;
      return e;
    }
    e.type = word;
    const std::size_t n = load_u32(buf_.data() + pos_ + 4);
    const std::size_t start = pos_ + 8;
    if (n > buf_.size() - start) {
      corrupt("declared " + std::to_string(n) + " bytes exceed remaining " +
              std::to_string(buf_.size() - start));
    }
    e.data = buf_.subspan(start, n);
    std::size_t advance = n;
    if (e.type != miCOMPRESSED) advance = (n + 7) & ~std::size_t{7};
    pos_ = std::min(buf_.size(), start + advance);
    return e;
  }

 private:
  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

std::optional<std::size_t> type_width(std::uint32_t type) {
  switch (type) {
    case miINT8:
    case miUINT8: return 1;
    case miINT16:
    case miUINT16: return 2;
    case miINT32:
    case miUINT32:
    case miSINGLE: return 4;
    case miDOUBLE:
    case miINT64:
    case miUINT64: return 8;
    default: return std::nullopt;
  }
}

double load_value(std::uint32_t type, const std::uint8_t* p) {
  switch (type) {
    case miINT8: return static_cast<std::int8_t>(p[0]);
    case miUINT8: return p[0];
    case miINT16: return static_cast<std::int16_t>(p[0] | (p[1] << 8));
    case miUINT16: return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    case miINT32: return static_cast<std::int32_t>(load_u32(p));
    case miUINT32: return load_u32(p);
    case miSINGLE: return std::bit_cast<float>(load_u32(p));
    case miDOUBLE: return std::bit_cast<double>(load_u64(p));
    case miINT64: return static_cast<double>(static_cast<std::int64_t>(load_u64(p)));
    case miUINT64: return static_cast<double>(load_u64(p));
    default: return 0.0;
  }
}

std::vector<std::uint8_t> inflate_element(std::span<const std::uint8_t> in, int window_bits) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) corrupt("inflate initialisation failed");
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 15];
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      corrupt("compressed data invalid (zlib code " + std::to_string(rc) + ")");
    }
    const std::size_t produced = sizeof(chunk) - zs.avail_out;
    out.insert(out.end(), chunk, chunk + produced);
    if (out.size() > kMaxInflated) {
      inflateEnd(&zs);
      corrupt("compressed element inflates beyond limit");
    }
    if (rc != Z_STREAM_END && produced == 0 && zs.avail_in == 0) {
      inflateEnd(&zs);
      corrupt("compressed stream ends prematurely");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> in) {
  if (in.size() > std::numeric_limits<uInt>::max()) corrupt("compressed element too large");
  try {
    return inflate_element(in, 15);  // zlib-wrapped, as written by MATLAB
  } catch (const Error&) {
    return inflate_element(in, -15);  // bare deflate stream
  }
}

void read_matrix(std::span<const std::uint8_t> body, std::vector<NamedMatrix>& out,
                 Warnings* warnings) {
  ElementStream s(body);
  const auto flags = s.next();
  if (flags.type != miUINT32 || flags.data.size() < 8) corrupt("array flags missing");
  const std::uint32_t flag_word = load_u32(flags.data.data());
  const std::uint32_t cls = flag_word & 0xff;
  const bool complex = (flag_word & 0x0800) != 0;

  const auto dims_el = s.next();
  if (dims_el.type != miINT32 || dims_el.data.size() < 8 || dims_el.data.size() % 4 != 0) {
    corrupt("dimensions missing");
  }
  std::vector<std::int64_t> dims;
  for (std::size_t i = 0; i < dims_el.data.size(); i += 4) {
    dims.push_back(static_cast<std::int32_t>(load_u32(dims_el.data.data() + i)));
  }
  const auto name_el = s.next();
  if (name_el.type != miINT8) corrupt("array name missing");
  const std::string name(name_el.data.begin(), name_el.data.end());

  if (cls != mxDOUBLE && cls != mxSINGLE) {
    const char* what = cls == mxSTRUCT   ? "struct"
                       : cls == mxCELL   ? "cell"
                       : cls == mxCHAR   ? "char"
                       : cls == mxSPARSE ? "sparse"
                       : cls == mxOBJECT ? "object"
                                         : "non-floating-point";
    warn(warnings, "variable '" + name + "' skipped: " + what + " arrays are not imported");
    return;
  }
  if (complex) {
    warn(warnings, "variable '" + name + "' skipped: complex matrices are not imported");
    return;
  }
  if (dims.size() != 2) {
    warn(warnings, "variable '" + name + "' skipped: " + std::to_string(dims.size()) +
                       "-dimensional arrays are not imported");
    return;
  }
  if (dims[0] < 0 || dims[1] < 0) corrupt("negative dimension in '" + name + "'");
  const auto rows = static_cast<std::size_t>(dims[0]);
  const auto cols = static_cast<std::size_t>(dims[1]);

  const auto real = s.next();
  const auto width = type_width(real.type);
  if (!width) corrupt("variable '" + name + "' has non-numeric storage type");
  const std::size_t count = real.data.size() / *width;
  if (real.data.size() % *width != 0 || rows * cols != count ||
      (rows != 0 && count / rows != cols)) {
    corrupt("variable '" + name + "' holds " + std::to_string(count) + " values, dims say " +
            std::to_string(rows) + "x" + std::to_string(cols));
  }
  NamedMatrix m;
  m.name = name;
  m.rows = rows;
  m.cols = cols;
  m.values.resize(count);
  // column-major on disk
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      m.values[r * cols + c] = load_value(real.type, real.data.data() + (c * rows + r) * *width);
    }
  }
  out.push_back(std::move(m));
}

void read_elements(std::span<const std::uint8_t> buf, bool allow_compressed,
                   std::vector<NamedMatrix>& out, Warnings* warnings) {
  ElementStream s(buf);
  while (!s.done()) {
    const auto e = s.next();
    if (e.type == miMATRIX) {
      if (!e.data.empty()) read_matrix(e.data, out, warnings);
    } else if (e.type == miCOMPRESSED && allow_compressed) {
      const auto inflated = decompress(e.data);
      read_elements(inflated, false, out, warnings);
    } else {
      warn(warnings, "top-level element of type " + std::to_string(e.type) + " skipped");
    }
  }
}

}  // namespace

std::vector<NamedMatrix> parse_mat(std::span<const std::uint8_t> bytes, Warnings* warnings) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorCode::NotLevel5, "file shorter than the 128-byte Level-5 header");
  }
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), 116);
  if (text.find("MATLAB 5.0") == std::string_view::npos) {
    throw Error(ErrorCode::NotLevel5, "header text lacks 'MATLAB 5.0'");
  }
  if (bytes[126] != 'I' || bytes[127] != 'M') {
    throw Error(ErrorCode::EndianUnsupported, "endian indicator is not 'IM' (little-endian)");
  }
  std::vector<NamedMatrix> out;
  read_elements(bytes.subspan(kHeaderSize), true, out, warnings);
  return out;
}

}  // namespace gaitkit::formats
