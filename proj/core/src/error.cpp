#include "shl/error.hpp"

namespace shl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInsufficientSample: return "insufficient-sample";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kInvalidDistribution: return "invalid-distribution";
    case ErrorKind::kDegenerateTable: return "degenerate-table";
    case ErrorKind::kDegenerateSequence: return "degenerate-sequence";
    case ErrorKind::kInconsistentCounts: return "inconsistent-counts";
    case ErrorKind::kType: return "type";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace shl
