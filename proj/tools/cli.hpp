#pragma once

#include <iosfwd>

namespace mec::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidInput = 2,
  kSolverMaxIter = 3,
};

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Property suite on seeded small instances; prints a pass/fail table.
int run_verify(int seed_count, std::ostream& out);

}  // namespace mec::cli
