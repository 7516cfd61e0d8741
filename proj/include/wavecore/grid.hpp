#pragma once
// Periodic 1D/2D collocation grids and FFT-based spectral operations.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace wavecore {

using cplx = std::complex<double>;
using RField = std::vector<double>;
using CField = std::vector<cplx>;

class FftEngine;

class Grid {
 public:
  Grid(double length, std::size_t n);
  Grid(double lx, double ly, std::size_t nx, std::size_t ny);

  int dims() const { return dims_; }
  std::size_t n(int axis) const { return n_[axis]; }
  double length(int axis) const { return len_[axis]; }
  double dx(int axis) const { return len_[axis] / static_cast<double>(n_[axis]); }
  std::size_t size() const { return n_[0] * n_[1]; }
  double cell_area() const;
  double kmax(int axis) const;
  // Smallest nonzero lattice wavenumber over all axes.
  double kmin() const;

  // Coordinate of node i along an axis.
  double coord(int axis, std::size_t i) const { return dx(axis) * static_cast<double>(i); }
  // Signed-ordering wavenumber of index i along an axis.
  double wavenumber(int axis, std::size_t i) const;

  // Per-point tables in storage order (flat index = ix*ny + iy).
  const RField& kx() const { return kx_; }
  const RField& ky() const { return ky_; }
  const RField& kabs() const { return kabs_; }
  RField x_table() const;
  RField y_table() const;

  std::size_t index(std::size_t ix, std::size_t iy = 0) const { return ix * n_[1] + iy; }

  CField forward(const RField& f) const;
  CField forward(const CField& f) const;
  CField inverse(const CField& fh) const;
  RField inverse_real(const CField& fh) const;
  // In-place variants on caller-owned buffers of size().
  void forward_inplace(CField& a) const;
  void inverse_inplace(CField& a) const;

  bool same_shape(const Grid& o) const;

 private:
  void build_tables();
  int dims_;
  std::array<std::size_t, 2> n_{};
  std::array<double, 2> len_{};
  RField kx_, ky_, kabs_;
  std::shared_ptr<FftEngine> fft_;
};

// (i k_axis)^order applied spectrally.
RField spectral_derivative(const Grid& g, const RField& f, int axis, int order);
CField spectral_derivative(const Grid& g, const CField& f, int axis, int order);

// Transform, multiply pointwise by a wavenumber-indexed table, inverse transform.
RField apply_multiplier(const Grid& g, const RField& f, const RField& m);
CField apply_multiplier(const Grid& g, const CField& f, const RField& m);
CField apply_multiplier(const Grid& g, const CField& f, const CField& m);

RField gradient_x(const Grid& g, const RField& f);
RField gradient_y(const Grid& g, const RField& f);
// Divergence of a vector field (fx, fy); fy ignored in 1D.
RField divergence(const Grid& g, const RField& fx, const RField& fy);

// Periodic Catmull-Rom interpolation (C^1, exact at nodes).
double interpolate(const Grid& g, const RField& f, double x, double y = 0.0);
cplx interpolate(const Grid& g, const CField& f, double x, double y = 0.0);

// Grid-sum quadrature (trapezoid on a periodic lattice).
double integrate(const Grid& g, const RField& f);
double max_abs(const RField& f);

}  // namespace wavecore
