#pragma once

// Runs an ExperimentSpec and renders the result as CSV.

#include <iosfwd>
#include <string>
#include <vector>

#include "fdrelay/cli/config.hpp"

namespace fdrelay::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitNumeric = 3,
};

/// RSI levels used by figures whose captions only say "different RSI levels".
inline const std::vector<double> kFigureRsiGrid = {0.0, 0.01, 0.1, 0.3};

struct RunOutput {
  std::string csv;
  bool checks_passed = true;  // false only when a validate check fails
};

/// Throws ConfigError, DomainError or NumericError.
RunOutput execute(const ExperimentSpec& spec);

/// execute() plus output routing and error-to-exit-code mapping. CSV goes to
/// spec.output_path, or `out` when that is empty; diagnostics go to `err`.
int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form.
std::string format_number(double x);

}  // namespace fdrelay::cli
