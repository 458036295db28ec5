#include "pcace/error.hpp"

namespace pcace {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AllRowsDegenerate: return "AllRowsDegenerate";
    case ErrorCode::RetentionTooLarge: return "RetentionTooLarge";
    case ErrorCode::DegenerateResponse: return "DegenerateResponse";
    case ErrorCode::ManifestMissing: return "ManifestMissing";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ChannelSetMismatch: return "ChannelSetMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& context)
    : std::runtime_error(std::string(error_name(code)) + ": " + context),
      code_(code),
      context_(context) {}

}  // namespace pcace
