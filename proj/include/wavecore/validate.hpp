#pragma once
// Small-grid self-check of the operator, conservation and dispersion
// properties. Failures are report content, never exceptions.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace wavecore {

struct ValidateOptions {
  bool quick = false;           // N = 64 everywhere
  std::uint64_t seed = 20240611;
  bool break_symmetry = false;  // fault injection into the DN operator
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct ValidateReport {
  std::vector<CheckResult> checks;
  ValidateOptions options;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

ValidateReport validate_suite(const ValidateOptions& opt = {});

}  // namespace wavecore
