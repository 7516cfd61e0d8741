#include "wavecore/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wavecore/errors.hpp"

namespace wavecore {

//////////////////////////////////////////////////////////////////////////////
// FFT plans

class FftEngine {
 public:
  FftEngine(int dims, std::size_t nx, std::size_t ny) : total_(nx * ny) {
    fftw_complex* buf = fftw_alloc_complex(total_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (dims == 1) {
      fwd_ = fftw_plan_dft_1d(static_cast<int>(nx), buf, buf, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_1d(static_cast<int>(nx), buf, buf, FFTW_BACKWARD, flags);
    } else {
      fwd_ = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), buf, buf, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(ny), buf, buf, FFTW_BACKWARD, flags);
    }
    fftw_free(buf);
  }
  ~FftEngine() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  void forward(CField& a) const { run(fwd_, a); }
  void backward(CField& a) const {
    run(bwd_, a);
    const double s = 1.0 / static_cast<double>(total_);
    for (auto& v : a) v *= s;
  }

 private:
  static void run(fftw_plan p, CField& a) {
    auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, ptr, ptr);
  }
  std::size_t total_;
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

//////////////////////////////////////////////////////////////////////////////
// Grid

namespace {
void check_count(std::size_t n) {
  if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid point count must be even and >= 8");
}
void check_length(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid length must be positive");
}
}  // namespace

Grid::Grid(double length, std::size_t n) : dims_(1), n_{n, 1}, len_{length, 1.0} {
  check_count(n);
  check_length(length);
  build_tables();
  fft_ = std::make_shared<FftEngine>(1, n, 1);
}

Grid::Grid(double lx, double ly, std::size_t nx, std::size_t ny) : dims_(2), n_{nx, ny}, len_{lx, ly} {
  check_count(nx);
  check_count(ny);
  check_length(lx);
  check_length(ly);
  build_tables();
  fft_ = std::make_shared<FftEngine>(2, nx, ny);
}

double Grid::wavenumber(int axis, std::size_t i) const {
  const auto n = static_cast<long>(n_[axis]);
  long j = static_cast<long>(i);
  if (j >= n / 2) j -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(j) / len_[axis];
}

void Grid::build_tables() {
  const std::size_t N = size();
  kx_.assign(N, 0.0);
  ky_.assign(N, 0.0);
  kabs_.assign(N, 0.0);
  for (std::size_t i = 0; i < n_[0]; ++i) {
    const double a = wavenumber(0, i);
    for (std::size_t j = 0; j < n_[1]; ++j) {
      const double b = dims_ == 2 ? wavenumber(1, j) : 0.0;
      const std::size_t id = index(i, j);
      kx_[id] = a;
      ky_[id] = b;
      kabs_[id] = std::hypot(a, b);
    }
  }
}

double Grid::cell_area() const { return dims_ == 1 ? dx(0) : dx(0) * dx(1); }

double Grid::kmax(int axis) const { return std::numbers::pi * static_cast<double>(n_[axis]) / len_[axis]; }

double Grid::kmin() const {
  double k = 2.0 * std::numbers::pi / len_[0];
  if (dims_ == 2) k = std::min(k, 2.0 * std::numbers::pi / len_[1]);
  return k;
}

RField Grid::x_table() const {
  RField x(size());
  for (std::size_t i = 0; i < n_[0]; ++i)
    for (std::size_t j = 0; j < n_[1]; ++j) x[index(i, j)] = coord(0, i);
  return x;
}

RField Grid::y_table() const {
  RField y(size(), 0.0);
  if (dims_ == 1) return y;
  for (std::size_t i = 0; i < n_[0]; ++i)
    for (std::size_t j = 0; j < n_[1]; ++j) y[index(i, j)] = coord(1, j);
  return y;
}

CField Grid::forward(const RField& f) const {
  if (f.size() != size()) throw GridMismatch("field size does not match grid");
  CField a(f.begin(), f.end());
  fft_->forward(a);
  return a;
}

CField Grid::forward(const CField& f) const {
  if (f.size() != size()) throw GridMismatch("field size does not match grid");
  CField a = f;
  fft_->forward(a);
  return a;
}

CField Grid::inverse(const CField& fh) const {
  if (fh.size() != size()) throw GridMismatch("spectrum size does not match grid");
  CField a = fh;
  fft_->backward(a);
  return a;
}

void Grid::forward_inplace(CField& a) const {
  if (a.size() != size()) throw GridMismatch("field size does not match grid");
  fft_->forward(a);
}

void Grid::inverse_inplace(CField& a) const {
  if (a.size() != size()) throw GridMismatch("spectrum size does not match grid");
  fft_->backward(a);
}

RField Grid::inverse_real(const CField& fh) const {
  CField a = inverse(fh);
  RField r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].real();
  return r;
}

bool Grid::same_shape(const Grid& o) const {
  return dims_ == o.dims_ && n_ == o.n_ && len_ == o.len_;
}

//////////////////////////////////////////////////////////////////////////////
// Spectral operators

namespace {

bool is_nyquist(const Grid& g, int axis, std::size_t flat) {
  const std::size_t i = axis == 0 ? flat / g.n(1) : flat % g.n(1);
  return i == g.n(axis) / 2;
}

void derivative_in_place(const Grid& g, CField& fh, int axis, int order) {
  if (axis < 0 || axis >= g.dims()) throw std::invalid_argument("derivative axis out of range");
  if (order <= 0) throw std::invalid_argument("derivative order must be positive");
  const RField& k = axis == 0 ? g.kx() : g.ky();
  const bool odd = order % 2 == 1;
  for (std::size_t i = 0; i < fh.size(); ++i) {
    if (odd && is_nyquist(g, axis, i)) {
      fh[i] = 0.0;
      continue;
    }
    fh[i] *= std::pow(cplx(0.0, k[i]), order);
  }
}

}  // namespace

RField spectral_derivative(const Grid& g, const RField& f, int axis, int order) {
  CField fh = g.forward(f);
  derivative_in_place(g, fh, axis, order);
  return g.inverse_real(fh);
}

CField spectral_derivative(const Grid& g, const CField& f, int axis, int order) {
  CField fh = g.forward(f);
  derivative_in_place(g, fh, axis, order);
  return g.inverse(fh);
}

RField apply_multiplier(const Grid& g, const RField& f, const RField& m) {
  if (m.size() != g.size()) throw GridMismatch("multiplier table shape mismatch");
  CField fh = g.forward(f);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= m[i];
  return g.inverse_real(fh);
}

CField apply_multiplier(const Grid& g, const CField& f, const RField& m) {
  if (m.size() != g.size()) throw GridMismatch("multiplier table shape mismatch");
  CField fh = g.forward(f);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= m[i];
  return g.inverse(fh);
}

CField apply_multiplier(const Grid& g, const CField& f, const CField& m) {
  if (m.size() != g.size()) throw GridMismatch("multiplier table shape mismatch");
  CField fh = g.forward(f);
  for (std::size_t i = 0; i < fh.size(); ++i) fh[i] *= m[i];
  return g.inverse(fh);
}

RField gradient_x(const Grid& g, const RField& f) { return spectral_derivative(g, f, 0, 1); }

RField gradient_y(const Grid& g, const RField& f) {
  if (g.dims() < 2) return RField(f.size(), 0.0);
  return spectral_derivative(g, f, 1, 1);
}

RField divergence(const Grid& g, const RField& fx, const RField& fy) {
  RField d = gradient_x(g, fx);
  if (g.dims() == 2) {
    RField dy = gradient_y(g, fy);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += dy[i];
  }
  return d;
}

//////////////////////////////////////////////////////////////////////////////
// Interpolation: cubic Hermite with fourth-order centered slopes, periodic.

namespace {

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  long r = i % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

// v holds samples at offsets -2..3 relative to the left node; t in [0,1).
template <class T>
T hermite6(const T* v, double t) {
  const T s0 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / 12.0;
  const T s1 = (v[1] - 8.0 * v[2] + 8.0 * v[4] - v[5]) / 12.0;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * v[2] + h10 * s0 + h01 * v[3] + h11 * s1;
}

template <class T>
T interp_impl(const Grid& g, const std::vector<T>& f, double x, double y) {
  if (f.size() != g.size()) throw GridMismatch("field size does not match grid");
  const double ux = x / g.dx(0);
  const double fx = std::floor(ux);
  const double tx = ux - fx;
  const long ix = static_cast<long>(fx);
  const std::size_t nx = g.n(0);
  if (g.dims() == 1) {
    T v[6];
    for (int a = 0; a < 6; ++a) v[a] = f[wrap(ix - 2 + a, nx)];
    return hermite6(v, tx);
  }
  const double uy = y / g.dx(1);
  const double fy = std::floor(uy);
  const double ty = uy - fy;
  const long iy = static_cast<long>(fy);
  const std::size_t ny = g.n(1);
  T rows[6];
  for (int a = 0; a < 6; ++a) {
    const std::size_t r = wrap(ix - 2 + a, nx);
    T v[6];
    for (int b = 0; b < 6; ++b) v[b] = f[g.index(r, wrap(iy - 2 + b, ny))];
    rows[a] = hermite6(v, ty);
  }
  return hermite6(rows, tx);
}

}  // namespace

double interpolate(const Grid& g, const RField& f, double x, double y) { return interp_impl(g, f, x, y); }

cplx interpolate(const Grid& g, const CField& f, double x, double y) { return interp_impl(g, f, x, y); }

double integrate(const Grid& g, const RField& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.cell_area();
}

double max_abs(const RField& f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace wavecore
