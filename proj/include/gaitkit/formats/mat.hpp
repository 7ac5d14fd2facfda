#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaitkit/core/error.hpp"

namespace gaitkit::formats {

/// Real 2-D matrix, stored row-major.
struct NamedMatrix {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values.at(r * cols + c); }
};

/// Returns every top-level real 2-D double/single matrix of a little-endian
/// Level-5 MAT file, inflating compressed elements. Other variables are
/// skipped with a warning.
/// Errors: NotLevel5, EndianUnsupported, ElementCorrupt.
std::vector<NamedMatrix> parse_mat(std::span<const std::uint8_t> bytes,
                                   Warnings* warnings = nullptr);

}  // namespace gaitkit::formats
