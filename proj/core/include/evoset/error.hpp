#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evoset {

enum class ErrorCode {
  kInvalidArgument,
  kUnknownVertex,
  kBeyondHorizon,
  kInvalidState,
  kVertexLeftSupport,
  kNonMonotone,
  kCapExceeded,
  kEmptyState,
  kNotLattice,
  kRetryExhausted,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` lets callers branch
/// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace evoset
