#include "alsp/error.hpp"

namespace alsp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnorderedTimestamps: return "UnorderedTimestamps";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnreachableTarget: return "UnreachableTarget";
    case ErrorCode::MissingLayer: return "MissingLayer";
    case ErrorCode::HookFailure: return "HookFailure";
    case ErrorCode::AlignmentMismatch: return "AlignmentMismatch";
    case ErrorCode::EmptyReferenceCorpus: return "EmptyReferenceCorpus";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NoQualifyingUnits: return "NoQualifyingUnits";
    case ErrorCode::LengthCountMismatch: return "LengthCountMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace alsp
