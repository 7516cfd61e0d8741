// Terrain-following finite-difference solve of the scaled Laplace problem.
//
// Unknown F(x, zeta) with z = zeta * b(x), zeta in [-1, 0]. Level j sits at
// zeta_j = -j h, h = 1/nz. The surface level carries the Dirichlet data; the
// bottom Neumann condition is imposed with a ghost level.

#include <cmath>
#include <stdexcept>

#include "wavecore/dn_operator.hpp"
#include "wavecore/errors.hpp"

namespace wavecore {

namespace {

class BvpProblem {
 public:
  BvpProblem(const Grid& g, const RField& b, double mu, int nz)
      : g_(g), N_(g.n(0)), nz_(nz), h_(1.0 / nz), mu2_(mu * mu), b_(b) {
    bx_ = gradient_x(g, b);
    a_.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) a_[i] = bx_[i] / b_[i];
    ax_ = gradient_x(g, a_);
    // Bottom slope of F from the Neumann condition: F_zeta = c * F_x.
    cb_.resize(N_);
    for (std::size_t i = 0; i < N_; ++i) cb_[i] = -mu2_ * b_[i] * bx_[i] / (1.0 + mu2_ * bx_[i] * bx_[i]);
    double s = 0.0;
    for (double v : b) s += v;
    bbar_ = s / static_cast<double>(N_);
  }

  std::size_t unknowns() const { return N_ * static_cast<std::size_t>(nz_); }

  // Residual of the discrete equations at levels 1..nz, given all levels 0..nz.
  // Storage: level-major, F[j*N + i].
  void apply_full(const std::vector<double>& F, std::vector<double>& out) const {
    const std::size_t N = N_;
    const int nz = nz_;
    const double h = h_;
    std::vector<double> Fx((nz + 1) * N), Fxx((nz + 1) * N);
    RField lvl(N);
    for (int j = 0; j <= nz; ++j) {
      std::copy(F.begin() + j * N, F.begin() + (j + 1) * N, lvl.begin());
      CField fh = g_.forward(lvl);
      CField d1 = fh, d2 = fh;
      const RField& k = g_.kx();
      for (std::size_t i = 0; i < N; ++i) {
        d1[i] *= (i == N / 2) ? 0.0 : cplx(0.0, k[i]);
        d2[i] *= -k[i] * k[i];
      }
      const RField r1 = g_.inverse_real(d1), r2 = g_.inverse_real(d2);
      std::copy(r1.begin(), r1.end(), Fx.begin() + j * N);
      std::copy(r2.begin(), r2.end(), Fxx.begin() + j * N);
    }
    out.assign(unknowns(), 0.0);
    for (int j = 1; j <= nz; ++j) {
      const double zeta = -j * h;
      for (std::size_t i = 0; i < N; ++i) {
        const double a = a_[i], ax = ax_[i], b = b_[i];
        const double f0 = F[j * N + i];
        const double fm = F[(j - 1) * N + i];
        double fz, fzz, fxz;
        if (j < nz) {
          const double fp = F[(j + 1) * N + i];
          fz = -(fp - fm) / (2.0 * h);
          fzz = (fp - 2.0 * f0 + fm) / (h * h);
          fxz = -(Fx[(j + 1) * N + i] - Fx[(j - 1) * N + i]) / (2.0 * h);
        } else {
          fz = cb_[i] * Fx[j * N + i];
          fzz = (2.0 * fm - 2.0 * f0 - 2.0 * h * fz) / (h * h);
          fxz = bottom_fxz_[i];
        }
        const double lap = Fxx[j * N + i] - 2.0 * zeta * a * fxz + (zeta * a * a - zeta * ax) * fz +
                           zeta * zeta * a * a * fzz;
        out[(j - 1) * N + i] = mu2_ * lap + fzz / (b * b);
      }
    }
  }

  // Precompute d/dx of the bottom slope expression for a given state.
  void prepare_bottom(const std::vector<double>& F) const {
    RField lvl(F.begin() + nz_ * N_, F.begin() + (nz_ + 1) * N_);
    const RField fx = gradient_x(g_, lvl);
    RField s(N_);
    for (std::size_t i = 0; i < N_; ++i) s[i] = cb_[i] * fx[i];
    bottom_fxz_ = gradient_x(g_, s);
  }

  // Flat-depth preconditioner: per Fourier mode, tridiagonal in depth.
  void precondition(const std::vector<double>& r, std::vector<double>& z) const {
    const std::size_t N = N_;
    const int nz = nz_;
    const double h = h_;
    std::vector<CField> rh(nz);
    for (int j = 0; j < nz; ++j) rh[j] = g_.forward(RField(r.begin() + j * N, r.begin() + (j + 1) * N));
    const double c = 1.0 / (bbar_ * bbar_ * h * h);
    std::vector<CField> sol(nz, CField(N));
    std::vector<double> cp(nz);
    std::vector<cplx> dp(nz);
    for (std::size_t m = 0; m < N; ++m) {
      const double k = g_.kx()[m];
      const double diag = -mu2_ * k * k - 2.0 * c;
      // Rows j = 1..nz mapped to 0..nz-1; lower/upper = c, last lower = 2c.
      for (int j = 0; j < nz; ++j) {
        const double lower = (j == nz - 1) ? 2.0 * c : c;
        const double upper = (j == nz - 1) ? 0.0 : c;
        const double denom = diag - (j > 0 ? lower * cp[j - 1] : 0.0);
        cp[j] = upper / denom;
        dp[j] = (rh[j][m] - (j > 0 ? lower * dp[j - 1] : cplx(0.0))) / denom;
      }
      sol[nz - 1][m] = dp[nz - 1];
      for (int j = nz - 2; j >= 0; --j) sol[j][m] = dp[j] - cp[j] * sol[j + 1][m];
    }
    z.assign(unknowns(), 0.0);
    for (int j = 0; j < nz; ++j) {
      const RField v = g_.inverse_real(sol[j]);
      std::copy(v.begin(), v.end(), z.begin() + j * N);
    }
  }

  std::size_t N() const { return N_; }
  int nz() const { return nz_; }
  double h() const { return h_; }
  const RField& b() const { return b_; }

 private:
  const Grid& g_;
  std::size_t N_;
  int nz_;
  double h_, mu2_;
  RField b_, bx_, a_, ax_, cb_;
  double bbar_ = 1.0;
  mutable RField bottom_fxz_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Right-preconditioned restarted GMRES on A(u) = rhs.
template <class Op, class Prec>
int gmres(const Op& A, const Prec& P, const std::vector<double>& rhs, std::vector<double>& u, double tol, int max_iter,
          double& rel_res) {
  const std::size_t n = rhs.size();
  const int m = 40;
  const double bnorm = std::sqrt(dot(rhs, rhs));
  u.assign(n, 0.0);
  if (bnorm == 0.0) {
    rel_res = 0.0;
    return 0;
  }
  int total = 0;
  std::vector<double> r = rhs, w, z;
  while (total < max_iter) {
    const double beta = std::sqrt(dot(r, r));
    rel_res = beta / bnorm;
    if (rel_res < tol) return total;
    std::vector<std::vector<double>> V(1, r), Z;
    for (auto& v : V[0]) v /= beta;
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), e(m + 1, 0.0);
    e[0] = beta;
    int k = 0;
    for (; k < m && total < max_iter; ++k, ++total) {
      P(V[k], z);
      Z.push_back(z);
      A(z, w);
      for (int i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        for (std::size_t q = 0; q < n; ++q) w[q] -= H[i][k] * V[i][q];
      }
      H[k + 1][k] = std::sqrt(dot(w, w));
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double den = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = H[k][k] / den;
      sn[k] = H[k + 1][k] / den;
      H[k][k] = den;
      H[k + 1][k] = 0.0;
      e[k + 1] = -sn[k] * e[k];
      e[k] = cs[k] * e[k];
      const double hk1 = std::sqrt(dot(w, w));
      if (hk1 > 0.0) {
        V.push_back(w);
        for (auto& v : V.back()) v /= hk1;
      }
      if (std::abs(e[k + 1]) / bnorm < tol || hk1 == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = e[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < k; ++i)
      for (std::size_t q = 0; q < n; ++q) u[q] += y[i] * Z[i][q];
    // True residual.
    A(u, w);
    for (std::size_t q = 0; q < n; ++q) r[q] = rhs[q] - w[q];
  }
  rel_res = std::sqrt(dot(r, r)) / bnorm;
  return total;
}

BvpResult solve_once(const Grid& g, const RField& phi, const RField& b, double mu, int nz, double tol, int max_iter) {
  BvpProblem P(g, b, mu, nz);
  const std::size_t N = P.N();
  std::vector<double> full((nz + 1) * N, 0.0), res;
  std::copy(phi.begin(), phi.end(), full.begin());
  P.prepare_bottom(full);
  P.apply_full(full, res);
  std::vector<double> rhs(res.size());
  for (std::size_t i = 0; i < res.size(); ++i) rhs[i] = -res[i];

  auto A = [&](const std::vector<double>& u, std::vector<double>& out) {
    std::vector<double> f((nz + 1) * N, 0.0);
    std::copy(u.begin(), u.end(), f.begin() + N);
    P.prepare_bottom(f);
    P.apply_full(f, out);
  };
  auto M = [&](const std::vector<double>& r, std::vector<double>& z) { P.precondition(r, z); };

  std::vector<double> u;
  BvpResult out;
  out.iterations = gmres(A, M, rhs, u, tol, max_iter, out.residual);
  if (!(out.residual < std::max(tol, 1e-9))) throw NonConvergence("boundary-value oracle did not converge");

  const double h = P.h();
  out.dn.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double f0 = phi[i], f1 = u[i], f2 = u[N + i], f3 = u[2 * N + i], f4 = u[3 * N + i];
    // fourth-order one-sided stencil keeps the error expansion even in h
    const double fz = (25.0 * f0 - 48.0 * f1 + 36.0 * f2 - 16.0 * f3 + 3.0 * f4) / (12.0 * h);
    out.dn[i] = fz / b[i] / mu;
  }
  return out;
}

}  // namespace

BvpResult bvp_oracle(const Grid& g, const RField& phi, const RField& b, double mu, const BvpOptions& opt) {
  if (g.dims() != 1) throw std::invalid_argument("boundary-value oracle supports 1D surface grids only");
  if (phi.size() != g.size() || b.size() != g.size()) throw GridMismatch("bvp_oracle: field size mismatch");
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in (0, 1]");
  for (double v : b)
    if (!(v > 0.0)) throw std::invalid_argument("bvp_oracle: depth must be positive");
  const int nz = std::max(opt.nz, 64);
  BvpResult r = solve_once(g, phi, b, mu, nz, opt.tol, opt.max_iter);
  if (!opt.richardson) return r;
  BvpResult f = solve_once(g, phi, b, mu, 2 * nz, opt.tol, opt.max_iter);
  for (std::size_t i = 0; i < r.dn.size(); ++i) f.dn[i] = (4.0 * f.dn[i] - r.dn[i]) / 3.0;
  f.iterations += r.iterations;
  f.residual = std::max(f.residual, r.residual);
  return f;
}

}  // namespace wavecore
