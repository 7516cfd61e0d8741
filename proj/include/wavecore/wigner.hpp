#pragma once
// Discrete 1D Wigner distribution and phase-space peak tracking.

#include <string>
#include <vector>

#include "wavecore/dn_operator.hpp"
#include "wavecore/solver.hpp"

namespace wavecore {

// psi = sqrt(g) eta + i G^(1/2) phi. dn_sqrt must be the p = 1/2 operator.
CField energy_variable(const WaveState& s, const SeparableSymbol& dn_sqrt, double g = kGravity);

// How psi(x +- Y/2) is sampled between nodes.
enum class HalfSample { Spectral, Cubic };

struct WignerGrid {
  std::vector<double> x;  // centres
  std::vector<double> k;  // ascending lattice wavenumbers
  RField W;               // row-major: W[ix * k.size() + ik]
  double y_max = 0.0;
  double mu = 1.0;
  double imag_residue = 0.0;    // max |Im W| / max |W|
  std::size_t window_warnings = 0;  // centres where the lag product at +-y_max exceeds 1e-6 max|psi|^2
  double t = 0.0;

  double at(std::size_t ix, std::size_t ik) const { return W[ix * k.size() + ik]; }
  double dx() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
  double dk() const { return k.size() > 1 ? k[1] - k[0] : 0.0; }
  // Binary table plus a JSON sidecar holding the axis origins and spacings.
  void write(const std::string& path) const;
};

// Standard deviation of |psi| taken as a density (periodic-aware); the
// Gaussian exp(-x^2/2s^2) has width s.
double packet_width(const Grid& g, const CField& psi);

// W(x_j, k) = 1/(2 pi) * trapezoid over |Y| <= y_max of
// exp(-i Y k) psi(x_j + Y/2) conj(psi(x_j - Y/2)), lag spacing dx, all lattice
// k. y_max <= 0 selects 8 packet widths, clipped to L/2. Throws ConfigError
// when y_max exceeds L/2 or the grid is not 1D.
WignerGrid wigner_transform(const Grid& g, const CField& psi, double y_max = -1.0,
                            HalfSample mode = HalfSample::Spectral);

// Integrals over k and over x.
RField wigner_x_marginal(const WignerGrid& w);
RField wigner_k_marginal(const WignerGrid& w);
// |hat psi(k)|^2 with hat psi = (2 pi)^(-1/2) int e^{-ikx} psi dx, on the table's k axis.
RField spectral_density(const Grid& g, const CField& psi, const std::vector<double>& k_axis);

struct PhasePeak {
  double t, x, k, value;
};

// Argmax per frame refined by a quadratic fit on the 3x3 neighbourhood.
// Ties (within 1e-12 relative) go to the smaller x. `k_min` excludes bins with k < k_min. Throws
// std::invalid_argument on an empty sequence or an all-zero frame.
std::vector<PhasePeak> wigner_peak_track(const std::vector<WignerGrid>& frames, double k_min = -1e300);

}  // namespace wavecore
