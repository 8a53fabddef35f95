#pragma once

// Command execution for the qsuff tool. Reports are JSON documents that embed
// the input, the effective settings and the result; the same input and
// settings always produce the same bytes.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsuff_cli/json_io.hpp"

namespace qsuff::cli {

enum ExitCode : int {
  kExitSufficient = 0,
  kExitInsufficient = 1,
  kExitBorderline = 2,
  kExitNonStabilizing = 3,
  kExitRegionExit = 4,
  kExitFailure = 5,
  kExitParse = 64,
};

struct Settings {
  double tol = 1e-7;
  std::vector<double> t_grid = default_t_grid();
  std::uint64_t seed = kDefaultSeed;
};

json settings_to_json(const Settings& s);
Settings settings_from_json(const json& j, const std::string& pointer);

struct Outcome {
  int exit_code = kExitFailure;
  json report;
};

/// `command` is one of check-subalgebra, check-channel, decompose, ssa,
/// expfam-fit, expfam-check, verify. Never throws for input problems; they
/// become error reports with exit code 64.
Outcome execute(const std::string& command, const json& input, const Settings& settings);

/// Short plain-text rendering of a report.
std::string render_human(const json& report);

/// Entry point shared by the executable and the tests; `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsuff::cli
