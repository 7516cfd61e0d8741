#pragma once
// Scenario configuration: JSON parsing with line-located errors, named
// analytic environment families, built-in experiments and parameter hashes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavecore/solver.hpp"

namespace wavecore {

struct PacketSpec {
  double amplitude = 0.5;
  std::vector<double> center;  // one entry per axis
  std::vector<double> width;
  double k0 = 0.0;
  std::string potential = "zero";  // "zero" or "right" (one-way, flat-depth potential at the centre depth)
};

struct Scenario {
  std::string name;
  std::vector<double> length;   // per axis
  std::vector<std::size_t> n;   // per axis
  double gravity = kGravity;
  nlohmann::json bathymetry, current;
  PacketSpec packet;
  double duration = 0.0;
  int steps_per_period = 32;
  double output_every = 1.0;
  double sponge_width = 0.1;  // fraction of each axis, per side
  double sponge_rate = -1.0;  // < 0: 4 sigma(k0, bmax)
  double closure_width = -1.0;  // < 0: sponge band, at least 24 cells
  std::vector<std::string> models;
  std::vector<double> window;   // x0, x1 (, y0, y1)
  double mu = 1.0;
  int rank = 8;
  double wigner_y_max = -1.0;
  double wigner_k_min = -1.0;   // < 0: k0 / 2
  double ray_dt = -1.0;

  int dims() const { return static_cast<int>(n.size()); }
  Grid grid() const;
  // Canonical JSON of every resolved field; the hash is taken over its dump.
  nlohmann::json resolved() const;
};

// Throws ConfigError with "source:line: message" on any schema violation.
Scenario parse_scenario(const std::string& text, const std::string& source = "<config>");
Scenario load_scenario(const std::string& path);

std::vector<std::string> builtin_names();
Scenario builtin_scenario(const std::string& name);
std::uint64_t scenario_hash(const Scenario& s);
// Hash recorded when each built-in was frozen.
std::uint64_t stored_builtin_hash(const std::string& name);

// Quick mode: half the cells per axis (at least 64) and a quarter of the duration.
Scenario quick_variant(const Scenario& s);

// Gaussian helper exp(-(x - xc)^2 / (2 s^2)).
double gauss_bump(double x, double xc, double s);

// Periodic evaluation of a named family on a grid. Non-periodic families are
// blended to their edge-weighted mean over `closure` metres at each side.
struct FamilyField {
  RField value;
  RField dx, dxx;  // along x, filled for 1D families
};
FamilyField evaluate_depth(const nlohmann::json& spec, const Grid& g, double closure);
// Returns Ux, Uy (Uy zero in 1D) and, for families with a depth-varying form,
// the bulk current.
struct CurrentField {
  RField Ux, Uy;
  std::optional<BulkCurrent> bulk;
};
CurrentField evaluate_current(const nlohmann::json& spec, const Grid& g, double closure, const RField& depth);

double resolved_closure(const Scenario& s, const Grid& g);
double resolved_sponge_rate(const Scenario& s, double bmax);
Environment build_environment(const Scenario& s);
WaveState build_initial(const Scenario& s, const Environment& env);
// Carrier frequency U(x0).k0 + sigma(k0, b(x0)) at the packet centre.
double carrier_omega(const Scenario& s, const Environment& env);

}  // namespace wavecore
