#pragma once
// Command-line front end.
//
//   dstft gen|analyze|synthesize|roundtrip|wavefront|selftest --config <json>
//         [--threads N] [--oracle] [--strict-window]
//
// Exit codes: 0 success, 1 test or verdict failure, 2 input or config rejection.

#include <cstddef>
#include <iosfwd>

namespace dstft {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SelftestOptions {
  std::size_t oracle_cap = 1 << 16;
  bool inject_dft_scale_fault = false;
};

/// Embedded invariant suite at small scale. Prints a table, returns an exit code.
int run_selftest(const SelftestOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace dstft
