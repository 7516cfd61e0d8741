#pragma once
// Dirichlet-to-Neumann operators: flat multiplier, fast separable Weyl form,
// a dense midpoint-rule Weyl matrix and a terrain-following boundary-value solve.

#include <Eigen/Dense>

#include "wavecore/grid.hpp"

namespace wavecore {

// Normalized symbol |mu k| tanh(b |mu k|) / mu; at mu = 1 this is the physical DN symbol.
double dn_symbol(double kabs, double b, double mu);

// Multiplier table of the normalized symbol raised to power p (1 or 1/2).
// For p = 1/2 a smooth bump of height dn_symbol(b, kmin) is added below the
// first nonzero lattice wavenumber before the root is taken.
RField dn_power_table(const Grid& g, double b, double p, double mu);

RField dn_flat(const Grid& g, const RField& phi, double b0, double mu = 1.0);
RField dn_flat_power(const Grid& g, const RField& phi, double b0, double p, double mu = 1.0);

class SeparableSymbol {
 public:
  int rank() const { return static_cast<int>(depth_basis_.size()); }
  double power() const { return power_; }
  double mu() const { return mu_; }
  double bmin() const { return bmin_; }
  double bmax() const { return bmax_; }
  double fit_error() const { return fit_error_; }
  bool flat() const { return rank() == 1; }
  bool corrected() const { return !curv_basis_.empty(); }
  const Grid& grid() const { return grid_; }
  const RField& depth_basis(int r) const { return depth_basis_[r]; }
  const RField& wave_table(int r) const { return wave_tables_[r]; }

  // Test hook: drop the adjoint half of the symmetrized product.
  void set_break_symmetry(bool on) { break_symmetry_ = on; }
  bool break_symmetry() const { return break_symmetry_; }

 private:
  friend SeparableSymbol build_separable(const Grid&, const RField&, double, double, int, bool);
  friend RField dn_weyl_apply(const SeparableSymbol&, const RField&);
  friend CField dn_weyl_apply(const SeparableSymbol&, const CField&);
  explicit SeparableSymbol(const Grid& g) : grid_(g) {}
  Grid grid_;
  std::vector<RField> depth_basis_;
  std::vector<RField> wave_tables_;
  // Second-order terms: per rank, per Hessian component (xx; or xx, yy, xy).
  std::vector<std::vector<RField>> curv_basis_;
  std::vector<std::vector<RField>> curv_tables_;
  double power_ = 1.0, mu_ = 1.0, bmin_ = 0.0, bmax_ = 0.0, fit_error_ = 0.0;
  bool break_symmetry_ = false;
};

inline constexpr int kMaxSeparableRank = 32;
inline constexpr double kSeparableTolerance = 1e-10;

// Chebyshev interpolation in depth of the normalized symbol power. The rank
// starts at R and is raised until the fit error is below tolerance; throws
// RankInsufficient if rank 32 is not enough. With `second_order` the
// symmetrized product gains the symmetric curvature term that makes it agree
// with the midpoint-rule Weyl quantization through second order.
SeparableSymbol build_separable(const Grid& g, const RField& b, double p, double mu, int R = 8,
                                bool second_order = true);

// 1/2 sum_r [ phi_r(b) M_r(f) + M_r(phi_r(b) f) ], plus the curvature terms when present.
RField dn_weyl_apply(const SeparableSymbol& s, const RField& f);
CField dn_weyl_apply(const SeparableSymbol& s, const CField& f);

struct DenseWeyl {
  Eigen::MatrixXd G;        // Hermitian part
  double asymmetry = 0.0;   // ||G - G^T||_F / ||G||_F before symmetrization
};

// O(N^3) midpoint-rule Weyl matrix, 1D grids with N <= 4096 only.
DenseWeyl dense_weyl_oracle(const Grid& g, const RField& b, double p, double mu);

struct BvpOptions {
  int nz = 64;              // vertical levels (>= 64 enforced)
  bool richardson = false;  // combine nz and 2*nz solutions for a fourth-order result
  double tol = 1e-13;       // relative GMRES residual
  int max_iter = 400;
};

struct BvpResult {
  RField dn;  // normalized like dn_flat: vertical surface derivative divided by mu
  int iterations = 0;
  double residual = 0.0;
};

// Scaled Laplace problem (mu^2 d_xx + d_zz) in -b(x) < z < 0 on terrain-following
// levels: second-order differences in depth, Fourier collocation along x.
BvpResult bvp_oracle(const Grid& g, const RField& phi, const RField& b, double mu, const BvpOptions& opt = {});

}  // namespace wavecore
