// cli.hpp
// Command layer behind the `efk` executable.
//
//   efk check|solve-ivp|find-periodic|verify-stability|selftest
//       --config <path> [--out <dir>] [--jobs K] [--certificate]
//
// Exit codes: 0 success, 1 internal or self-test failure, 2 hypothesis or
// certificate failure, 3 convergence failure, 64 configuration error.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace efk {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitHypothesis = 2,
  kExitConvergence = 3,
  kExitConfig = 64,
};

struct CommandOptions {
  std::string command;
  std::optional<std::string> config_path;
  std::string out_dir = ".";
  std::size_t jobs = 1;
  bool certificate = false;
  bool residual_check = false;               ///< solve-ivp: add the mild-residual column
  std::optional<std::string> inject_fault;   ///< selftest: g2-typo | step-overrun
};

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

struct SelftestResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Invariant suite at small N. `fault` perturbs one check on purpose.
std::vector<SelftestResult> run_selftest(const std::optional<std::string>& fault, std::uint64_t seed = 0);

}  // namespace efk
