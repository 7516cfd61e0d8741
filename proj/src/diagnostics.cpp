#include "wavecore/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavecore/errors.hpp"

namespace wavecore {

RField potential_density(const WaveState& s, double g) {
  RField e(s.eta.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.5 * g * s.eta[i] * s.eta[i];
  return e;
}

RField kinetic_density(const WaveState& s, const SeparableSymbol& dn) {
  const RField gp = dn_weyl_apply(dn, s.phi);
  RField e(gp.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.5 * s.phi[i] * gp[i];
  return e;
}

RField energy_density(const WaveState& s, const SeparableSymbol& dn, double g) {
  RField e = kinetic_density(s, dn);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += 0.5 * g * s.eta[i] * s.eta[i];
  return e;
}

double total_energy(const WaveState& s, const SeparableSymbol& dn, double g) {
  return integrate(dn.grid(), energy_density(s, dn, g));
}

double surface_divergence_source(const WaveState& s, const Environment& env, SurfaceSourceForm form) {
  if (!env.has_flow) return 0.0;
  const RField div = divergence(env.grid, env.Ux, env.Uy);
  const double c = form == SurfaceSourceForm::Half ? 0.5 : 1.0;
  RField f(div.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = -div[i] * c * env.g * s.eta[i] * s.eta[i];
  return integrate(env.grid, f);
}

Eigen::Matrix2d strain(const BulkCurrent& c, std::size_t i, double z) {
  const double off = 0.5 * (c.du_dz(i, z) + c.dw_dx(i, z));
  Eigen::Matrix2d S;
  S << c.du_dx(i, z), off, off, c.dw_dz(i, z);
  return S;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  // Golub-Welsch: eigen-decomposition of the Legendre Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v = es.eigenvectors()(0, k);
    nodes[k] = 0.5 * (b - a) * es.eigenvalues()(k) + 0.5 * (b + a);
    weights[k] = (b - a) * v * v;
  }
}

double production_integral(const WaveState& s, const Environment& env, int nz) {
  if (!env.bulk) throw ConfigError("production integral needs a bulk current descriptor");
  const Grid& g = env.grid;
  if (g.dims() != 1) throw ConfigError("production integral is implemented for 1D grids");
  std::vector<double> z, w;
  const double depth = env.bmax();
  gauss_legendre(nz, -depth, 0.0, z, w);
  const BulkVelocity v = harmonic_extension(g, s.phi, env.b, z);
  const BulkCurrent& c = *env.bulk;
  double total = 0.0;
  for (std::size_t l = 0; l < z.size(); ++l) {
    double row = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Eigen::Matrix2d S = strain(c, i, z[l]);
      const double u = v.u[l][i], ww = v.w[l][i];
      row -= u * u * S(0, 0) + 2.0 * u * ww * S(0, 1) + ww * ww * S(1, 1);
    }
    total += w[l] * row;
  }
  return total * g.cell_area();
}

void EnergyReport::append(double time, double energy, double is, double ib) {
  if (t.empty()) {
    E_tilde.push_back(energy);
  } else {
    const double dt = time - t.back();
    E_tilde.push_back(E_tilde.back() + 0.5 * dt * (I_s.back() + I_b.back() + is + ib));
  }
  t.push_back(time);
  E_T.push_back(energy);
  I_s.push_back(is);
  I_b.push_back(ib);
}

void EnergyReport::write_csv(const std::string& path) const {
  write_csv_columns(path, {"t", "E_T", "I_s", "I_b", "E_tilde"}, {&t, &E_T, &I_s, &I_b, &E_tilde});
}

double budget_check(const EnergyReport& r) {
  if (r.empty()) throw std::invalid_argument("budget_check: empty energy report");
  double dev = 0.0;
  for (std::size_t n = 0; n < r.t.size(); ++n) dev = std::max(dev, std::abs(r.E_T[n] - r.E_tilde[n]));
  return dev / r.E_T.front();
}

RField envelope_extract(const Grid& g, const RField& eta, double k0) {
  CField h = g.forward(eta);
  const double side = k0 < 0 ? -1.0 : 1.0;
  const double nyq = g.kmax(0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double kx = side * g.kx()[i];
    if (kx > 0 && kx < nyq)
      h[i] *= 2.0;
    else if (kx < 0 || kx >= nyq)
      h[i] = 0.0;
  }
  const CField a = g.inverse(h);
  RField env(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) env[i] = std::abs(a[i]);
  return env;
}

}  // namespace wavecore
