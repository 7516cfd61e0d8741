#include "wavecore/wigner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <stdexcept>

#include "wavecore/errors.hpp"
#include "wavecore/field_io.hpp"

namespace wavecore {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

long floor_half(long m) { return m >= 0 ? m / 2 : -((-m + 1) / 2); }

}  // namespace

CField energy_variable(const WaveState& s, const SeparableSymbol& dn_sqrt, double g) {
  const Grid& grid = dn_sqrt.grid();
  if (s.eta.size() != grid.size() || s.phi.size() != grid.size())
    throw GridMismatch("energy_variable: state does not match the operator grid");
  if (dn_sqrt.power() != 0.5) throw ConfigError("energy_variable needs the square-root operator");
  const RField h = dn_weyl_apply(dn_sqrt, s.phi);
  CField psi(grid.size());
  const double sg = std::sqrt(g);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = cplx(sg * s.eta[i], h[i]);
  return psi;
}

double packet_width(const Grid& g, const CField& psi) {
  // Circular mean locates the centre on the periodic axis.
  const double L = g.length(0);
  cplx z = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = std::abs(psi[i]);
    z += w * std::polar(1.0, 2.0 * kPi * g.coord(0, i) / L);
    mass += w;
  }
  if (mass == 0.0) return 0.0;
  const double c = std::arg(z) / (2.0 * kPi) * L;
  double var = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double d = g.coord(0, i) - c;
    d -= L * std::floor(d / L + 0.5);
    var += std::abs(psi[i]) * d * d;
  }
  return std::sqrt(var / mass);
}

WignerGrid wigner_transform(const Grid& g, const CField& psi, double y_max, HalfSample mode) {
  if (g.dims() != 1) throw ConfigError("Wigner transform is 1D only");
  if (psi.size() != g.size()) throw GridMismatch("Wigner transform: field does not match grid");
  const std::size_t N = g.size();
  const double L = g.length(0), dx = g.dx(0);
  if (y_max <= 0.0) y_max = std::min(8.0 * packet_width(g, psi), 0.5 * L);
  if (y_max > 0.5 * L * (1.0 + 1e-12)) throw ConfigError("Wigner window exceeds half the domain");
  const long M = static_cast<long>(std::floor(y_max / dx + 1e-9));

  // Values at x_j + dx/2.
  CField half(N);
  if (mode == HalfSample::Spectral) {
    CField m(N);
    for (std::size_t i = 0; i < N; ++i) m[i] = std::polar(1.0, g.kx()[i] * 0.5 * dx);
    half = apply_multiplier(g, psi, m);
  } else {
    for (std::size_t i = 0; i < N; ++i) half[i] = interpolate(g, psi, g.coord(0, i) + 0.5 * dx);
  }
  // psi(x_j + m dx / 2)
  auto sample = [&](std::size_t j, long m) -> cplx {
    const long p = floor_half(m);
    const std::size_t idx = wrap(static_cast<long>(j) + p, N);
    return (m - 2 * p) == 0 ? psi[idx] : half[idx];
  };

  double pmax = 0.0;
  for (const cplx& v : psi) pmax = std::max(pmax, std::abs(v));

  WignerGrid w;
  w.y_max = y_max;
  w.x.resize(N);
  for (std::size_t i = 0; i < N; ++i) w.x[i] = g.coord(0, i);
  // Ascending k: lattice index order shifted by N/2.
  std::vector<std::size_t> order(N);
  for (std::size_t n = 0; n < N; ++n) order[n] = (n + (N + 1) / 2) % N;
  w.k.resize(N);
  for (std::size_t n = 0; n < N; ++n) w.k[n] = g.wavenumber(0, order[n]);
  w.W.assign(N * N, 0.0);

  double wmax = 0.0, imax = 0.0;
  CField lag(N);
  for (std::size_t j = 0; j < N; ++j) {
    std::fill(lag.begin(), lag.end(), cplx(0.0));
    for (long m = -M; m <= M; ++m) {
      const double tw = (m == -M || m == M) ? 0.5 : 1.0;
      lag[wrap(m, N)] += tw * sample(j, m) * std::conj(sample(j, -m));
    }
    if (std::abs(sample(j, M) * sample(j, -M)) > 1e-6 * pmax * pmax) ++w.window_warnings;
    const CField spec = g.forward(lag);
    for (std::size_t n = 0; n < N; ++n) {
      const cplx v = spec[order[n]] * (dx / (2.0 * kPi));
      w.W[j * N + n] = v.real();
      wmax = std::max(wmax, std::abs(v.real()));
      imax = std::max(imax, std::abs(v.imag()));
    }
  }
  w.imag_residue = wmax > 0.0 ? imax / wmax : 0.0;
  return w;
}

RField wigner_x_marginal(const WignerGrid& w) {
  RField m(w.x.size(), 0.0);
  const double dk = w.dk();
  for (std::size_t i = 0; i < w.x.size(); ++i)
    for (std::size_t n = 0; n < w.k.size(); ++n) m[i] += w.at(i, n) * dk;
  return m;
}

RField wigner_k_marginal(const WignerGrid& w) {
  RField m(w.k.size(), 0.0);
  const double dx = w.dx();
  for (std::size_t i = 0; i < w.x.size(); ++i)
    for (std::size_t n = 0; n < w.k.size(); ++n) m[n] += w.at(i, n) * dx;
  return m;
}

RField spectral_density(const Grid& g, const CField& psi, const std::vector<double>& k_axis) {
  RField out(k_axis.size());
  const double dx = g.dx(0);
  for (std::size_t n = 0; n < k_axis.size(); ++n) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += psi[i] * std::polar(1.0, -k_axis[n] * g.coord(0, i));
    out[n] = std::norm(s * dx) / (2.0 * kPi);
  }
  return out;
}

void WignerGrid::write(const std::string& path) const {
  GridHeader h;
  h.dims = 2;
  h.n = {x.size(), k.size()};
  h.len = {dx() * static_cast<double>(x.size()), dk() * static_cast<double>(k.size())};
  write_table_binary(path, h, W);
  nlohmann::json meta = {{"x0", x.empty() ? 0.0 : x.front()}, {"dx", dx()},          {"nx", x.size()},
                         {"k0", k.empty() ? 0.0 : k.front()}, {"dk", dk()},          {"nk", k.size()},
                         {"t", t},                            {"y_max", y_max},      {"mu", mu},
                         {"imag_residue", imag_residue},      {"layout", "row-major x by k"}};
  std::ofstream(path + ".json") << meta.dump(2) << "\n";
}

std::vector<PhasePeak> wigner_peak_track(const std::vector<WignerGrid>& frames, double k_min) {
  if (frames.empty()) throw std::invalid_argument("wigner_peak_track: no frames");
  std::vector<PhasePeak> out;
  for (const WignerGrid& f : frames) {
    const std::size_t nx = f.x.size(), nk = f.k.size();
    std::size_t bi = 0, bn = 0;
    double best = -1e300;
    bool any = false;
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t n = 0; n < nk; ++n) {
        if (f.k[n] < k_min) continue;
        const double v = f.at(i, n);
        if (v != 0.0) any = true;
        if (v > best + 1e-12 * std::abs(best)) {
          best = v;
          bi = i;
          bn = n;
        }
      }
    if (!any) throw std::invalid_argument("wigner_peak_track: all-zero frame");

    // Least-squares quadratic over the 3x3 neighbourhood, in cell units.
    double ox = 0.0, ok = 0.0, val = best;
    if (bi > 0 && bi + 1 < nx && bn > 0 && bn + 1 < nk) {
      Eigen::Matrix<double, 9, 6> A;
      Eigen::Matrix<double, 9, 1> y;
      int r = 0;
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b, ++r) {
          A.row(r) << 1.0, a, b, a * a, a * b, b * b;
          y(r) = f.at(bi + a, bn + b);
        }
      const Eigen::Matrix<double, 6, 1> c = A.colPivHouseholderQr().solve(y);
      Eigen::Matrix2d H;
      H << 2.0 * c(3), c(4), c(4), 2.0 * c(5);
      const Eigen::Vector2d grad(c(1), c(2));
      if (H.determinant() > 0.0 && H(0, 0) < 0.0) {
        const Eigen::Vector2d s = -H.ldlt().solve(grad);
        if (std::abs(s(0)) <= 1.0 && std::abs(s(1)) <= 1.0) {
          ox = s(0);
          ok = s(1);
          val = c(0) + grad.dot(s) + 0.5 * s.dot(H * s);
        }
      }
    }
    out.push_back({f.t, f.x[bi] + ox * f.dx(), f.k[bn] + ok * f.dk(), val});
  }
  return out;
}

}  // namespace wavecore
