// Mutation fuzz over the binary and text parsers, built with ASan and UBSan.
// Usage: parser_fuzz [iterations] [seed]
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <vector>

#include "mutate.hpp"
#include "test_support.hpp"

#include "gaitkit/core/error.hpp"
#include "gaitkit/formats/c3d.hpp"
#include "gaitkit/formats/mat.hpp"
#include "gaitkit/formats/trc.hpp"

using namespace gaitkit;
using gaitkit::testing::fixture_dir;
using gaitkit::testing::slurp_bytes;

namespace {

const char* kTrc =
    "PathFileType\t4\t(X/Y/Z)\twalk.trc\n"
    "DataRate\tCameraRate\tNumFrames\tNumMarkers\tUnits\tOrigDataRate\tOrigDataStartFrame\tOrigNumFrames\n"
    "100\t100\t3\t2\tmm\t100\t1\t3\n"
    "Frame#\tTime\tLHEE\t\t\tRHEE\n"
    "\t\tX1\tY1\tZ1\tX2\tY2\tZ2\n"
    "1\t0.00\t100.5\t200\t300\t400\t500\t600\n"
    "2\t0.01\t110\t210\t310\t\t\t\n"
    "3\t0.02\t120\t220\t320\t420\t520\t620\n";

}  // namespace

int main(int argc, char** argv) {
  const long iterations = argc > 1 ? std::strtol(argv[1], nullptr, 10) : 30000;
  const auto seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 99u;

  std::vector<std::vector<std::uint8_t>> seeds[3];
  for (const char* f : {"int16.c3d", "float.c3d"}) seeds[0].push_back(slurp_bytes(fixture_dir() / "fixtures/c3d" / f));
  for (const char* f : {"plain.mat", "compressed.mat", "big_endian.mat"}) {
    seeds[1].push_back(slurp_bytes(fixture_dir() / "fixtures/mat" / f));
  }
  seeds[2].emplace_back(kTrc, kTrc + std::char_traits<char>::length(kTrc));

  std::mt19937_64 rng(seed);
  long typed = 0, accepted = 0, untyped = 0;
  for (long i = 0; i < iterations; ++i) {
    const int which = static_cast<int>(i % 3);
    const auto input = gaitkit::testing::mutate(seeds[which][rng() % seeds[which].size()], rng);
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
      ++untyped;
      std::fprintf(stderr, "case %ld: untyped exception: %s\n", i, e.what());
    }
  }
  std::printf("%ld cases: %ld typed errors, %ld accepted, %ld untyped\n", iterations, typed, accepted, untyped);
  return untyped == 0 ? 0 : 1;
}
