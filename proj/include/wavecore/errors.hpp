#pragma once
#include <stdexcept>
#include <string>

namespace wavecore {

// Bad configuration or user input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instability or failed numerical invariant at run time (CLI exit code 3).
struct NumericalAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RankInsufficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The dispersion relation has no admissible root (e.g. blocked waves).
struct NoRoot : std::runtime_error {
  double where = 0.0;
  explicit NoRoot(const std::string& msg, double x = 0.0) : std::runtime_error(msg), where(x) {}
};

// Iteration failed to converge although a root appears to exist.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wavecore
