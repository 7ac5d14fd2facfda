#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gaitkit {

/// Every failure the engine can report. The snake_case spelling returned by
/// code_name() is the stable machine-readable identifier used by the CLI
/// error line and the HTTP error payload.
enum class ErrorCode {
  // formats
  MagicMismatch,
  UnsupportedProcessor,
  TruncatedData,
  ParameterCorrupt,
  CapacityExceeded,
  HeaderMalformed,
  MarkerCountMismatch,
  NonUniformTime,
  NotLevel5,
  EndianUnsupported,
  ElementCorrupt,
  SchemaMismatch,
  RaggedRow,
  NonMonotonicTime,
  InsufficientRows,
  // signal preparation
  CutoffAboveNyquist,
  MissingValuesPresent,
  TooFewSamples,
  InvalidArgument,
  AllMissingChannel,
  TooSparse,
  // features
  MissingForceChannels,
  NoContactsFound,
  BodyWeightUnknown,
  MarkerMissing,
  InsufficientCycles,
  CycleOutOfRange,
  ChannelMissing,
  // statistics
  EmptyEnsemble,
  LengthMismatch,
  EmptyInput,
  EmptyGroupA,
  // store
  PathInvalid,
  IoFailure,
  ValidationFailed,
  NotFound,
  CorruptFile,
  // service
  MissingEvents,
  InsufficientData,
  NoVideo,
  RangeNotSatisfiable,
  BadRequest,
  // command line
  Usage,
};

/// How a failure maps onto CLI exit codes (1 usage, 2 data, 3 I/O).
enum class ErrorCategory { Usage, Data, Io };

std::string_view code_name(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

/// Non-fatal diagnostics collected by parsers and preparation steps.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace gaitkit
