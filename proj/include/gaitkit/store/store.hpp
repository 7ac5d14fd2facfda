#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaitkit/core/error.hpp"
#include "gaitkit/core/model.hpp"
#include "gaitkit/formats/canonical_csv.hpp"

namespace gaitkit::store {

namespace fs = std::filesystem;

struct TrialMeta {
  std::optional<double> body_weight_n;
  std::optional<std::string> session_date;  // YYYY-MM-DD
  std::optional<std::string> label;
  std::optional<std::string> notes;
  nlohmann::json extra = nlohmann::json::object();  // unknown keys, kept verbatim

  /// Errors: CorruptFile (not an object, or a known key of the wrong type).
  static TrialMeta from_json(const std::string& text);
  std::string to_json() const;

  bool operator==(const TrialMeta&) const = default;
};

struct TrialBundle {
  TrialRef ref;
  std::map<formats::CanonicalKind, formats::CanonicalData> files;
  /// On save: file to copy in as video.mp4. On load: the stored video.
  std::optional<fs::path> video;
  TrialMeta meta;

  const TimeSeriesTable* table(formats::CanonicalKind kind) const;
  const GaitEvents* events() const;
  const SpatiotemporalRow* spatiotemporal() const;
};

inline constexpr const char* kVideoFile = "video.mp4";
inline constexpr const char* kMetaFile = "meta.json";

fs::path trial_dir(const fs::path& root, const TrialRef& ref);

/// Writes the bundle under <root>/<group>/<patient>/<trial>/ and replaces any
/// previous trial as a whole: the files are staged in a sibling directory and
/// swapped in with one rename. Writers of one trial serialize on an advisory
/// lock; readers never block.
/// Errors: PathInvalid, ValidationFailed (nothing written), IoFailure.
void save_trial(const fs::path& root, const TrialBundle& bundle);

/// Errors: NotFound, CorruptFile (names the file). Unrecognised files are
/// reported through `warnings`.
TrialBundle load_trial(const fs::path& root, const TrialRef& ref, Warnings* warnings = nullptr);

using Hierarchy = std::map<std::string, std::map<std::string, std::vector<std::string>>>;

/// group -> patient -> trials, sorted. Entries whose names break the naming
/// pattern and stray files are skipped with a warning; dot-entries silently.
/// Errors: IoFailure.
Hierarchy list_hierarchy(const fs::path& root, Warnings* warnings = nullptr);

/// Identifies one stored version of a trial; changes whenever it is saved.
struct TrialStamp {
  std::uint64_t device = 0;
  std::uint64_t inode = 0;
  std::int64_t mtime_ns = 0;

  bool operator==(const TrialStamp&) const = default;
};

std::optional<TrialStamp> trial_stamp(const fs::path& root, const TrialRef& ref);

}  // namespace gaitkit::store
