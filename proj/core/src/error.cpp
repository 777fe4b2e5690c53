#include "evoset/error.hpp"

namespace evoset {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kUnknownVertex: return "unknown vertex";
    case ErrorCode::kBeyondHorizon: return "beyond horizon";
    case ErrorCode::kInvalidState: return "invalid state";
    case ErrorCode::kVertexLeftSupport: return "vertex left the support";
    case ErrorCode::kNonMonotone: return "non-monotone vertex conductance";
    case ErrorCode::kCapExceeded: return "cap exceeded";
    case ErrorCode::kEmptyState: return "empty state";
    case ErrorCode::kNotLattice: return "not a lattice environment";
    case ErrorCode::kRetryExhausted: return "retry cap exhausted";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace evoset
