#pragma once
// Scenario execution: the exact surface solver plus the selected asymptotic
// models on a common output cadence, model comparison and run artefacts.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecore/asymptotics.hpp"
#include "wavecore/diagnostics.hpp"
#include "wavecore/scenario.hpp"
#include "wavecore/wigner.hpp"

namespace wavecore {

struct RunOptions {
  std::string out_dir;              // empty: keep results in memory only
  std::vector<std::string> models;  // empty: the scenario's own list
  bool quick = false;
  int wigner_tables = 3;            // Wigner frames exported (first, evenly spaced, last)
};

// Per-sample comparison of each model density with the exact right-going
// density over a window. Columns: t, then max_<m>, diff_<m>, total_<m> per
// model (diff is max |exact - m| over the window; totals are domain
// integrals divided by the L1 norm of the initial density).
struct ModelComparison {
  std::vector<std::string> names;
  std::map<std::string, std::vector<double>> columns;
  const std::vector<double>& col(const std::string& n) const { return columns.at(n); }
  std::size_t size() const { return columns.empty() ? 0 : columns.begin()->second.size(); }
  void write_csv(const std::string& path) const;
};

// Throws ConfigError if the window lies outside the domain or frame counts differ.
ModelComparison compare_models(const Grid& g, const std::vector<double>& t,
                               const std::map<std::string, std::vector<RField>>& density,
                               const std::vector<double>& window, double e0_l1);

struct WignerTrack {
  std::vector<PhasePeak> peaks;
  std::vector<double> ray_x, ray_k;   // ray state at the frame times
  std::vector<double> x_marginal_error, k_marginal_error, imag_residue;
  double tracked_fraction = 0.0;      // frames within one cell and one k-bin of the ray
};

struct RunResult {
  Scenario scenario;
  std::string out_dir;
  double omega = 0.0;
  double dt = 0.0;                 // exact solver step
  std::vector<double> t;           // output times
  // "exact" is the right-going density |P+ psi|^2 / 2; "exact_full" the
  // pointwise energy density; "action" and "schrodinger" the model energies.
  std::map<std::string, std::vector<RField>> density;
  std::vector<double> total_energy;  // integral of the full density per sample
  RField E0;
  std::optional<EnergyReport> budget;
  std::optional<RayTrajectory> ray;
  std::optional<double> turning_x;
  std::optional<WignerTrack> wigner;
  std::optional<ModelComparison> comparison;
  nlohmann::json manifest;
};

// Right-going part of the energy variable: Fourier modes with k_x > 0.
CField right_going(const Grid& g, const CField& psi);

// Writes outputs when opts.out_dir is set. On a non-finite state the last
// good checkpoint is written and NumericalAbort is rethrown.
RunResult run_scenario(const Scenario& s, const RunOptions& opts = {});

// Reads two run directories and compares the exact density of `a` with the
// exact density of `b` (column suffix exact_b) and with each of b's models.
ModelComparison compare_runs(const std::string& run_a, const std::string& run_b, const std::vector<double>& window);

}  // namespace wavecore
