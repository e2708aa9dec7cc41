#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shl {

enum class ErrorKind {
  kInsufficientSample,
  kDomain,
  kInvalidDistribution,
  kDegenerateTable,
  kDegenerateSequence,
  kInconsistentCounts,
  kType,
  kPrecondition,
  kInvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the core library carries one of the ErrorKind
/// classes so that callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace shl
