#include "wavecore/dn_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>

#include "wavecore/errors.hpp"

namespace wavecore {

namespace {

void check_mu(double mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in (0, 1]");
}

// C-infinity bump on |t| < 1 with value 1 at t = 0.
double bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double power_symbol(double kabs, double b, double p, double mu, double k1) {
  double s = dn_symbol(kabs, b, mu);
  if (p == 1.0) return s;
  s += dn_symbol(k1, b, mu) * bump(kabs / k1);
  return std::pow(s, p);
}

void check_power(double p) {
  if (p != 1.0 && p != 0.5) throw std::invalid_argument("symbol power must be 1 or 1/2");
}

}  // namespace

double dn_symbol(double kabs, double b, double mu) {
  const double q = std::abs(mu * kabs);
  return q * std::tanh(b * q) / mu;
}

RField dn_power_table(const Grid& g, double b, double p, double mu) {
  check_power(p);
  check_mu(mu);
  if (!(b > 0.0)) throw std::invalid_argument("depth must be positive");
  const RField& k = g.kabs();
  RField m(k.size());
  const double k1 = g.kmin();
  for (std::size_t i = 0; i < k.size(); ++i) m[i] = power_symbol(k[i], b, p, mu, k1);
  return m;
}

RField dn_flat(const Grid& g, const RField& phi, double b0, double mu) { return dn_flat_power(g, phi, b0, 1.0, mu); }

RField dn_flat_power(const Grid& g, const RField& phi, double b0, double p, double mu) {
  if (!(b0 > 0.0)) throw std::invalid_argument("dn_flat: depth must be positive");
  return apply_multiplier(g, phi, dn_power_table(g, b0, p, mu));
}

//////////////////////////////////////////////////////////////////////////////
// Separable symbol

namespace {

struct Cheb {
  std::vector<double> nodes, weights;
  double lo, hi;
  Cheb(int R, double a, double b) : nodes(R), weights(R), lo(a), hi(b) {
    for (int r = 0; r < R; ++r) {
      const double th = std::numbers::pi * (r + 0.5) / R;
      nodes[r] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(th);
      weights[r] = ((r % 2) ? -1.0 : 1.0) * std::sin(th);
    }
  }
  // Lagrange cardinal values at beta (barycentric form).
  void cardinals(double beta, std::vector<double>& out) const {
    const int R = static_cast<int>(nodes.size());
    out.assign(R, 0.0);
    for (int r = 0; r < R; ++r)
      if (beta == nodes[r]) {
        out[r] = 1.0;
        return;
      }
    double den = 0.0;
    for (int r = 0; r < R; ++r) {
      out[r] = weights[r] / (beta - nodes[r]);
      den += out[r];
    }
    for (int r = 0; r < R; ++r) out[r] /= den;
  }
};

// Wavenumber magnitudes at which the fit is validated.
std::vector<double> check_wavenumbers(const Grid& g) {
  std::vector<double> ks;
  if (g.dims() == 1) {
    for (std::size_t i = 0; i <= g.n(0) / 2; ++i) ks.push_back(std::abs(g.wavenumber(0, i)));
  } else {
    double kmx = 0.0;
    for (double v : g.kabs()) kmx = std::max(kmx, v);
    const int M = 1024;
    for (int i = 0; i <= M; ++i) ks.push_back(kmx * i / M);
    ks.push_back(g.kmin());
  }
  return ks;
}

double fit_error(const Cheb& c, const std::vector<double>& ks, double p, double mu, double k1) {
  const int R = static_cast<int>(c.nodes.size());
  const int nb = 129;
  std::vector<double> card;
  double worst = 0.0;
  std::vector<std::vector<double>> nodevals(R, std::vector<double>(ks.size()));
  for (int r = 0; r < R; ++r)
    for (std::size_t q = 0; q < ks.size(); ++q) nodevals[r][q] = power_symbol(ks[q], c.nodes[r], p, mu, k1);
  std::vector<double> scale(ks.size(), 0.0);
  for (std::size_t q = 0; q < ks.size(); ++q)
    scale[q] = std::max(power_symbol(ks[q], c.lo, p, mu, k1), power_symbol(ks[q], c.hi, p, mu, k1));
  for (int i = 0; i < nb; ++i) {
    const double beta = c.lo + (c.hi - c.lo) * i / (nb - 1);
    c.cardinals(beta, card);
    for (std::size_t q = 0; q < ks.size(); ++q) {
      if (scale[q] == 0.0) continue;
      double v = 0.0;
      for (int r = 0; r < R; ++r) v += card[r] * nodevals[r][q];
      const double e = std::abs(v - power_symbol(ks[q], beta, p, mu, k1)) / scale[q];
      worst = std::max(worst, e);
    }
  }
  return worst;
}

}  // namespace

namespace {

// First and second derivatives of the radial symbol by five-point differences.
void radial_derivatives(double kappa, double beta, double p, double mu, double k1, double h, double& d1,
                        double& d2) {
  auto F = [&](double k) { return power_symbol(std::abs(k), beta, p, mu, k1); };
  const double fm2 = F(kappa - 2 * h), fm1 = F(kappa - h), f0 = F(kappa), fp1 = F(kappa + h), fp2 = F(kappa + 2 * h);
  d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
  d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
}

// Hessian components of the symbol table at depth beta: xx (1D) or xx, yy, xy (2D).
std::vector<RField> hessian_tables(const Grid& g, double beta, double p, double mu) {
  const double k1 = g.kmin();
  const double h = 1e-3 * std::min(k1, 1.0 / (mu * beta));
  const std::size_t N = g.size();
  const int nc = g.dims() == 1 ? 1 : 3;
  std::vector<RField> t(nc, RField(N));
  for (std::size_t i = 0; i < N; ++i) {
    const double ka = g.kabs()[i];
    double d1, d2;
    radial_derivatives(ka, beta, p, mu, k1, h, d1, d2);
    if (g.dims() == 1) {
      t[0][i] = d2;
      continue;
    }
    if (ka < 1e-12) {
      t[0][i] = t[1][i] = d2;
      t[2][i] = 0.0;
      continue;
    }
    const double cx = g.kx()[i] / ka, cy = g.ky()[i] / ka, ov = d1 / ka;
    t[0][i] = d2 * cx * cx + ov * (1.0 - cx * cx);
    t[1][i] = d2 * cy * cy + ov * (1.0 - cy * cy);
    t[2][i] = (d2 - ov) * cx * cy;
  }
  return t;
}

std::vector<RField> curvature_fields(const Grid& g, const RField& a) {
  if (g.dims() == 1) return {spectral_derivative(g, a, 0, 2)};
  return {spectral_derivative(g, a, 0, 2), spectral_derivative(g, a, 1, 2),
          spectral_derivative(g, spectral_derivative(g, a, 0, 1), 1, 1)};
}

}  // namespace

SeparableSymbol build_separable(const Grid& g, const RField& b, double p, double mu, int R, bool second_order) {
  check_power(p);
  check_mu(mu);
  if (b.size() != g.size()) throw GridMismatch("bathymetry size does not match grid");
  if (R < 4) throw std::invalid_argument("separable rank must be >= 4");
  const auto [mn, mx] = std::minmax_element(b.begin(), b.end());
  if (!(*mn > 0.0)) throw std::invalid_argument("bathymetry must be positive");

  SeparableSymbol s(g);
  s.power_ = p;
  s.mu_ = mu;
  s.bmin_ = *mn;
  s.bmax_ = *mx;
  if (*mx - *mn <= 1e-14 * *mx) {
    s.depth_basis_.assign(1, RField(g.size(), 1.0));
    s.wave_tables_.assign(1, dn_power_table(g, *mx, p, mu));
    return s;
  }
  const auto ks = check_wavenumbers(g);
  const double k1 = g.kmin();
  for (int rank = R; rank <= kMaxSeparableRank; ++rank) {
    Cheb c(rank, *mn, *mx);
    const double err = fit_error(c, ks, p, mu, k1);
    if (err >= kSeparableTolerance) continue;
    s.fit_error_ = err;
    s.depth_basis_.assign(rank, RField(g.size()));
    std::vector<double> card;
    for (std::size_t i = 0; i < g.size(); ++i) {
      c.cardinals(b[i], card);
      for (int r = 0; r < rank; ++r) s.depth_basis_[r][i] = card[r];
    }
    s.wave_tables_.clear();
    for (int r = 0; r < rank; ++r) s.wave_tables_.push_back(dn_power_table(g, c.nodes[r], p, mu));
    if (second_order) {
      for (int r = 0; r < rank; ++r) {
        s.curv_basis_.push_back(curvature_fields(g, s.depth_basis_[r]));
        s.curv_tables_.push_back(hessian_tables(g, c.nodes[r], p, mu));
      }
    }
    return s;
  }
  throw RankInsufficient("separable depth expansion needs more than 32 terms");
}

namespace {

struct Product {
  const RField* a;
  const RField* t;
  double w;
};

// One-sided form used by the symmetry-breaking test hook: 2 w a M_t(f).
template <class F>
void one_sided_product(const Grid& g, const Product& p, const CField& fh, F& out, CField& buf) {
  const std::size_t N = g.size();
  for (std::size_t i = 0; i < N; ++i) buf[i] = fh[i] * (*p.t)[i];
  g.inverse_inplace(buf);
  for (std::size_t i = 0; i < N; ++i) {
    if constexpr (std::is_same_v<F, RField>)
      out[i] += 2.0 * p.w * (*p.a)[i] * buf[i].real();
    else
      out[i] += 2.0 * p.w * (*p.a)[i] * buf[i];
  }
}

// w [ a M_t(f) + M_t(a f) ]: physical part into out, spectral part into acc.
template <class F>
void product(const Grid& g, const Product& p, const F& f, const CField& fh, F& out, CField& acc, CField& buf) {
  const std::size_t N = g.size();
  const RField& a = *p.a;
  const RField& t = *p.t;
  for (std::size_t i = 0; i < N; ++i) buf[i] = fh[i] * t[i];
  g.inverse_inplace(buf);
  for (std::size_t i = 0; i < N; ++i) {
    if constexpr (std::is_same_v<F, RField>)
      out[i] += p.w * a[i] * buf[i].real();
    else
      out[i] += p.w * a[i] * buf[i];
  }
  for (std::size_t i = 0; i < N; ++i) buf[i] = a[i] * f[i];
  g.forward_inplace(buf);
  for (std::size_t i = 0; i < N; ++i) acc[i] += p.w * buf[i] * t[i];
}

template <class F>
F weyl_apply_impl(const SeparableSymbol& s, const F& f, const std::vector<std::vector<RField>>& cb,
                  const std::vector<std::vector<RField>>& ct) {
  const Grid& g = s.grid();
  if (f.size() != g.size()) throw GridMismatch("dn_weyl_apply: field size does not match grid");
  if (s.flat()) return apply_multiplier(g, f, s.wave_table(0));
  const std::size_t N = g.size();
  static const double comp_weight[3] = {1.0, 1.0, 2.0};
  std::vector<Product> prods;
  for (int r = 0; r < s.rank(); ++r) {
    prods.push_back({&s.depth_basis(r), &s.wave_table(r), 0.5});
    if (cb.empty()) continue;
    for (std::size_t c = 0; c < cb[r].size(); ++c) prods.push_back({&cb[r][c], &ct[r][c], comp_weight[c] / 16.0});
  }
  CField fh(f.begin(), f.end());
  g.forward_inplace(fh);
  F out(N, 0.0);
  CField acc(N, 0.0), buf(N);
  if (s.break_symmetry()) {
    for (const Product& p : prods) one_sided_product(g, p, fh, out, buf);
    return out;
  }
  for (const Product& p : prods) product(g, p, f, fh, out, acc, buf);
  g.inverse_inplace(acc);
  for (std::size_t i = 0; i < N; ++i) {
    if constexpr (std::is_same_v<F, RField>)
      out[i] += acc[i].real();
    else
      out[i] += acc[i];
  }
  return out;
}

}  // namespace

RField dn_weyl_apply(const SeparableSymbol& s, const RField& f) {
  return weyl_apply_impl(s, f, s.curv_basis_, s.curv_tables_);
}
CField dn_weyl_apply(const SeparableSymbol& s, const CField& f) {
  return weyl_apply_impl(s, f, s.curv_basis_, s.curv_tables_);
}

//////////////////////////////////////////////////////////////////////////////
// Dense midpoint-rule oracle

DenseWeyl dense_weyl_oracle(const Grid& g, const RField& b, double p, double mu) {
  check_power(p);
  check_mu(mu);
  if (g.dims() != 1) throw std::invalid_argument("dense Weyl oracle is 1D only");
  const std::size_t N = g.n(0);
  if (N > 4096) throw std::invalid_argument("dense Weyl oracle limited to N <= 4096");
  if (b.size() != N) throw GridMismatch("bathymetry size does not match grid");
  const double L = g.length(0), dx = g.dx(0), k1 = g.kmin();
  std::vector<double> cosv(N);
  for (std::size_t n = 0; n < N; ++n) cosv[n] = std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / N);
  // |k| of lattice index q (0..N/2).
  std::vector<double> kq(N / 2 + 1);
  for (std::size_t q = 0; q <= N / 2; ++q) kq[q] = 2.0 * std::numbers::pi * static_cast<double>(q) / L;

  Eigen::MatrixXd G(N, N);
  std::vector<double> sym(N / 2 + 1);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t m = 0; m < N; ++m) {
      const long n = static_cast<long>(j) - static_cast<long>(m);
      double d = n * dx;
      d -= L * std::floor(d / L + 0.5);  // wrapped separation in [-L/2, L/2)
      double mid = static_cast<double>(m) * dx + 0.5 * d;
      mid -= L * std::floor(mid / L);
      const double bm = interpolate(g, b, mid);
      for (std::size_t q = 0; q <= N / 2; ++q) sym[q] = power_symbol(kq[q], bm, p, mu, k1);
      if (2 * std::abs(n) == static_cast<long>(N)) {
        // antipodal pair: both periodic midpoints are equally valid, average them
        const double bo = interpolate(g, b, mid + 0.5 * L);
        for (std::size_t q = 0; q <= N / 2; ++q) sym[q] = 0.5 * (sym[q] + power_symbol(kq[q], bo, p, mu, k1));
      }
      const std::size_t nn = static_cast<std::size_t>(((n % static_cast<long>(N)) + static_cast<long>(N)) % static_cast<long>(N));
      double acc = sym[0];
      for (std::size_t q = 1; q < N / 2; ++q) acc += 2.0 * cosv[(nn * q) % N] * sym[q];
      acc += cosv[(nn * (N / 2)) % N] * sym[N / 2];
      G(j, m) = acc / static_cast<double>(N);
    }
  }
  DenseWeyl out;
  const double nrm = G.norm();
  out.asymmetry = nrm > 0.0 ? (G - G.transpose()).norm() / nrm : 0.0;
  out.G = 0.5 * (G + G.transpose());
  return out;
}

}  // namespace wavecore
