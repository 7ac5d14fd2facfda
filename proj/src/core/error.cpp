#include "gaitkit/core/error.hpp"

namespace gaitkit {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MagicMismatch: return "magic_mismatch";
    case ErrorCode::UnsupportedProcessor: return "unsupported_processor";
    case ErrorCode::TruncatedData: return "truncated_data";
    case ErrorCode::ParameterCorrupt: return "parameter_corrupt";
    case ErrorCode::CapacityExceeded: return "capacity_exceeded";
    case ErrorCode::HeaderMalformed: return "header_malformed";
    case ErrorCode::MarkerCountMismatch: return "marker_count_mismatch";
    case ErrorCode::NonUniformTime: return "non_uniform_time";
    case ErrorCode::NotLevel5: return "not_level5";
    case ErrorCode::EndianUnsupported: return "endian_unsupported";
    case ErrorCode::ElementCorrupt: return "element_corrupt";
    case ErrorCode::SchemaMismatch: return "schema_mismatch";
    case ErrorCode::RaggedRow: return "ragged_row";
    case ErrorCode::NonMonotonicTime: return "non_monotonic_time";
    case ErrorCode::InsufficientRows: return "insufficient_rows";
    case ErrorCode::CutoffAboveNyquist: return "cutoff_above_nyquist";
    case ErrorCode::MissingValuesPresent: return "missing_values_present";
    case ErrorCode::TooFewSamples: return "too_few_samples";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::AllMissingChannel: return "all_missing_channel";
    case ErrorCode::TooSparse: return "too_sparse";
    case ErrorCode::MissingForceChannels: return "missing_force_channels";
    case ErrorCode::NoContactsFound: return "no_contacts_found";
    case ErrorCode::BodyWeightUnknown: return "body_weight_unknown";
    case ErrorCode::MarkerMissing: return "marker_missing";
    case ErrorCode::InsufficientCycles: return "insufficient_cycles";
    case ErrorCode::CycleOutOfRange: return "cycle_out_of_range";
    case ErrorCode::ChannelMissing: return "channel_missing";
    case ErrorCode::EmptyEnsemble: return "empty_ensemble";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::EmptyInput: return "empty_input";
    case ErrorCode::EmptyGroupA: return "empty_group_a";
    case ErrorCode::PathInvalid: return "path_invalid";
    case ErrorCode::IoFailure: return "io_failure";
    case ErrorCode::ValidationFailed: return "validation_failed";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::CorruptFile: return "corrupt_file";
    case ErrorCode::MissingEvents: return "missing_events";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::NoVideo: return "no_video";
    case ErrorCode::RangeNotSatisfiable: return "range_not_satisfiable";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoFailure:
    case ErrorCode::NotFound:
    case ErrorCode::NoVideo:
      return ErrorCategory::Io;
    case ErrorCode::BadRequest:
    case ErrorCode::Usage:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace gaitkit
