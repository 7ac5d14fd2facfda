#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gaitkit/core/model.hpp"
#include "gaitkit/stats/stats.hpp"
#include "gaitkit/store/store.hpp"

namespace gaitkit::service {

namespace fs = std::filesystem;

struct CycleSelection {
  enum class Mode { First, Index, All };
  Mode mode = Mode::First;
  std::size_t index = 0;
};

struct EnsembleRequest {
  std::vector<TrialRef> trials_a;
  std::vector<TrialRef> trials_b;
  std::string variable;  // "<kind>.<channel>", e.g. grf.fx or joint_angles.shank
  Side side = Side::Left;
  CycleSelection cycle;
  std::size_t points = kDefaultCyclePoints;
  double alpha = 0.05;
};

struct EnsemblePayload {
  stats::EnsembleSummary group_a;
  std::optional<stats::EnsembleSummary> group_b;
  std::string channel;  // resolved channel name
};

struct SpatiotemporalPayload {
  struct DualBox {
    std::optional<stats::BoxStats> a;
    std::optional<stats::BoxStats> b;
  };
  std::map<std::string, DualBox> box;  // by parameter name
  stats::RadarSummary radar;
  std::map<TrialRef, SpatiotemporalRow> per_trial;
};

struct TrialWindow {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Plain HTTP-shaped result of a route handler.
struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

/// Maps an error code onto an HTTP status.
int http_status(ErrorCode code) noexcept;
/// JSON error response {"error": <code>, "detail": <message>}.
Response error_response(const Error& e);

/// Errors: BadRequest.
EnsembleRequest parse_ensemble_request(const nlohmann::json& body);
CycleSelection parse_cycle(const nlohmann::json& value);

nlohmann::json to_json(const stats::EnsembleSummary& s);
nlohmann::json to_json(const EnsemblePayload& p);
nlohmann::json to_json(const stats::BoxStats& b);
nlohmann::json to_json(const SpatiotemporalRow& row);
nlohmann::json to_json(const SpatiotemporalPayload& p);

/// Read-only view of a trial store with a parsed-trial cache. A cached trial
/// is reused while its directory stamp is unchanged. Safe for concurrent use.
class Api {
 public:
  explicit Api(fs::path root);

  const fs::path& root() const noexcept { return root_; }

  std::shared_ptr<const store::TrialBundle> trial(const TrialRef& ref) const;

  /// Errors: NotFound, MissingEvents, ChannelMissing, CycleOutOfRange,
  /// BadRequest, EmptyEnsemble.
  EnsemblePayload ensemble(const EnsembleRequest& req) const;
  /// Errors: NotFound, InsufficientData, BadRequest.
  SpatiotemporalPayload spatiotemporal(const std::vector<TrialRef>& trials_a,
                                       const std::vector<TrialRef>& trials_b) const;
  /// Errors: NotFound, MissingEvents, CycleOutOfRange.
  TrialWindow window(const TrialRef& ref, Side side, std::size_t cycle) const;
  /// Spatiotemporal row of one trial: stored, or computed from motion + events.
  SpatiotemporalRow trial_parameters(const TrialRef& ref) const;

  // Route handlers; every error becomes a JSON error response.
  Response get_groups() const;
  Response get_patients(const std::string& group) const;
  Response get_trials(const std::string& group, const std::string& patient) const;
  Response post_ensemble(const std::string& body) const;
  Response post_spatiotemporal(const std::string& body) const;
  Response get_window(const std::string& group, const std::string& patient, const std::string& trial,
                      const std::optional<std::string>& side,
                      const std::optional<std::string>& cycle) const;
  /// Single byte ranges give 206, unsatisfiable ones 416, several ranges the
  /// full body.
  Response get_video(const std::string& group, const std::string& patient, const std::string& trial,
                     const std::optional<std::string>& range) const;

 private:
  struct Entry {
    store::TrialStamp stamp;
    std::shared_ptr<const store::TrialBundle> bundle;
  };

  fs::path root_;
  mutable std::shared_mutex mutex_;
  mutable std::map<TrialRef, Entry> cache_;
};

/// Result of interpreting a Range header against a body of `size` bytes.
struct RangeDecision {
  enum class Kind { Full, Partial, Unsatisfiable };
  Kind kind = Kind::Full;
  std::uint64_t first = 0;
  std::uint64_t last = 0;  // inclusive
};

RangeDecision decide_range(const std::optional<std::string>& header, std::uint64_t size);

}  // namespace gaitkit::service
