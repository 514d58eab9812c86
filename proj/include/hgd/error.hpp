#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hgd {

enum class ErrorCode {
  NotSymmetric,
  NonPositiveEigenvalue,
  DimensionMismatch,
  Overflow,
  BadLength,
  EmptyInput,
  ZeroDimension,
  TooFewPixels,
  RegionTooSmall,
  EmptyRegion,
  InconsistentLengths,
  EmptyTrainingSet,
  ZeroVector,
  VariantMismatch,
  ZeroNorm,
  NoValidProbes,
  BadMagic,
  VersionMismatch,
  ChecksumMismatch,
  Io,
  Decode,
  Parse,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace hgd
