#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcace {

enum class ErrorCode {
  InvalidArgument,
  NonFiniteValue,
  LengthMismatch,
  ShapeMismatch,
  AllRowsDegenerate,
  RetentionTooLarge,
  DegenerateResponse,
  ManifestMissing,
  InvalidManifest,
  SizeMismatch,
  ChannelSetMismatch,
  ParseError,
  IoError,
};

/// Stable name used in CLI messages and Python exceptions.
std::string_view error_name(ErrorCode code) noexcept;

/// The single exception type thrown by the library. what() reads
/// "<ErrorName>: <context>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& context);

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace pcace
