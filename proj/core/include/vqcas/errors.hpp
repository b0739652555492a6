#pragma once

#include <stdexcept>
#include <string>

namespace vqcas {

/// Requested problem size falls outside what a routine supports.
struct UnsupportedSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Readout-mitigation failure (singular or ill-conditioned calibration).
struct MitigationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Text-format parse failure; carries the 1-based line number when known.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, long line_number = 0)
      : std::runtime_error(line_number > 0 ? what + " (line " + std::to_string(line_number) + ")"
                                           : what),
        line(line_number) {}
  long line;
};

/// Optimizer hit a non-finite evaluation or an internal breakdown.
struct OptimizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// External orbital-update command failed or produced no output.
struct ExternalCommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vqcas
