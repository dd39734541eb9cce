#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vidrisk {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kOutOfRange,
  kDuplicateId,
  kDimensionMismatch,
  kKindMismatch,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kChecksumMismatch,
  kCorruptFile,
  kVersionMismatch,
  kSingleClass,
  kNonFiniteLoss,
  kNonConvergence,
  kBackendFailure,
  kBackendUnreachable,
  kDecodeFailure,
  kMissingCache,
  kConfig,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kDuplicateId: return "duplicate id";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kKindMismatch: return "kind mismatch";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported version";
    case ErrorCode::kTruncated: return "truncated payload";
    case ErrorCode::kChecksumMismatch: return "checksum mismatch";
    case ErrorCode::kCorruptFile: return "corrupt file";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kSingleClass: return "single class";
    case ErrorCode::kNonFiniteLoss: return "non-finite loss";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kBackendFailure: return "backend failure";
    case ErrorCode::kBackendUnreachable: return "backend unreachable";
    case ErrorCode::kDecodeFailure: return "decode failure";
    case ErrorCode::kMissingCache: return "missing cache";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

/// Every failure raised by the library. The code identifies the failure
/// class; the message carries the context (video id, line number, path).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace vidrisk
