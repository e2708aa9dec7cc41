#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "shl/homogeneity.hpp"

namespace shl::cli {

/// Process exit codes. Audit-style commands map the verdict; every error
/// class (usage, I/O, parse, precondition, invalid config) maps to 2.
enum ExitCode : int {
  kExitOk = 0,
  kExitHomogeneous = 0,
  kExitInhomogeneous = 1,
  kExitError = 2,
  kExitInconclusive = 3,
};

int exit_code_for(Verdict verdict) noexcept;

/// Entry point shared by main() and the tests. args[0] is the program name.
int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

}  // namespace shl::cli
