#pragma once
// Energy accounting for the surface system and the bulk production term.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wavecore/solver.hpp"

namespace wavecore {

// Pointwise 1/2 (g eta^2 + phi G phi). May be locally negative.
RField energy_density(const WaveState& s, const SeparableSymbol& dn, double g = kGravity);
RField potential_density(const WaveState& s, double g = kGravity);
RField kinetic_density(const WaveState& s, const SeparableSymbol& dn);
double total_energy(const WaveState& s, const SeparableSymbol& dn, double g = kGravity);

// Half: -int div(U) g eta^2 / 2 (default). Full drops the 1/2.
enum class SurfaceSourceForm { Half, Full };

double surface_divergence_source(const WaveState& s, const Environment& env,
                                 SurfaceSourceForm form = SurfaceSourceForm::Half);

// Symmetric part of the (x,z) gradient of the bulk current at node i, depth z.
Eigen::Matrix2d strain(const BulkCurrent& c, std::size_t i, double z);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

// int int -u.S u dz dx over the flat water column, velocities from the
// harmonic extension of phi. Throws ConfigError without a bulk current or
// over a variable bottom.
double production_integral(const WaveState& s, const Environment& env, int nz = 32);

struct EnergyReport {
  std::vector<double> t, E_T, I_s, I_b, E_tilde;

  // Appends a sample; E_tilde integrates I_s + I_b by the trapezoid rule.
  void append(double time, double energy, double is, double ib);
  bool empty() const { return t.empty(); }
  void write_csv(const std::string& path) const;
};

// max_t |E_T - E_tilde| / E_T(0). Throws std::invalid_argument on an empty report.
double budget_check(const EnergyReport& r);

// |analytic signal| of eta along x, keeping wavenumbers on the side of k0.
// Meaningful only for signals narrow-banded around +-k0.
RField envelope_extract(const Grid& g, const RField& eta, double k0);

}  // namespace wavecore
