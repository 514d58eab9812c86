#include "hgd/error.hpp"

namespace hgd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonPositiveEigenvalue: return "NonPositiveEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::TooFewPixels: return "TooFewPixels";
    case ErrorCode::RegionTooSmall: return "RegionTooSmall";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::InconsistentLengths: return "InconsistentLengths";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::NoValidProbes: return "NoValidProbes";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Decode: return "Decode";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hgd
