#include "wavecore/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wavecore/errors.hpp"

namespace wavecore {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Periodic distance from node coordinate x to centre c on an axis of length L.
double wrapped(double x, double c, double L) {
  double d = x - c;
  return d - L * std::floor(d / L + 0.5);
}

void axpy(RField& y, double a, const RField& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

bool all_finite(const RField& f) {
  double s = 0.0;
  for (double v : f) s += v * 0.0;
  return std::isfinite(s);
}

}  // namespace

double BulkCurrent::u(std::size_t i, double z) const {
  return U0 + amplitude * profile[i] * std::cos(kPi * z / depth);
}
double BulkCurrent::w(std::size_t i, double z) const {
  return -amplitude * (depth / kPi) * profile_dx[i] * std::sin(kPi * z / depth);
}
double BulkCurrent::du_dx(std::size_t i, double z) const {
  return amplitude * profile_dx[i] * std::cos(kPi * z / depth);
}
double BulkCurrent::du_dz(std::size_t i, double z) const {
  return -amplitude * profile[i] * (kPi / depth) * std::sin(kPi * z / depth);
}
double BulkCurrent::dw_dx(std::size_t i, double z) const {
  return -amplitude * (depth / kPi) * profile_dxx[i] * std::sin(kPi * z / depth);
}
double BulkCurrent::dw_dz(std::size_t i, double z) const {
  return -amplitude * profile_dx[i] * std::cos(kPi * z / depth);
}
RField BulkCurrent::surface_trace() const {
  RField s(profile.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = U0 + amplitude * profile[i];
  return s;
}

RField sponge_rate(const Grid& g, const SpongeProfile& sp) {
  if (sp.s0 <= 0.0) return {};
  if (!(sp.width > 0.0 && sp.width < 0.5)) throw ConfigError("sponge width fraction must lie in (0, 0.5)");
  RField rate(g.size());
  for (std::size_t ix = 0; ix < g.n(0); ++ix) {
    for (std::size_t iy = 0; iy < g.n(1); ++iy) {
      double keep = 1.0;
      for (int a = 0; a < g.dims(); ++a) {
        const double L = g.length(a);
        const double x = g.coord(a, a == 0 ? ix : iy);
        const double d = std::min(x, L - x);
        keep *= 1.0 - smoothstep(1.0 - d / (sp.width * L));
      }
      rate[g.index(ix, iy)] = sp.s0 * (1.0 - keep);
    }
  }
  return rate;
}

double Environment::bmin() const { return *std::min_element(b.begin(), b.end()); }
double Environment::bmax() const { return *std::max_element(b.begin(), b.end()); }
double Environment::max_speed() const {
  double m = 0.0;
  for (std::size_t i = 0; i < Ux.size(); ++i) m = std::max(m, std::hypot(Ux[i], Uy[i]));
  return m;
}

Environment make_environment(const Grid& grid, RField b, RField Ux, RField Uy, const SpongeProfile& sponge,
                             std::optional<BulkCurrent> bulk, double g) {
  const std::size_t N = grid.size();
  if (b.size() != N) throw ConfigError("depth field does not match the grid");
  if (Ux.empty()) Ux.assign(N, 0.0);
  if (Uy.empty()) Uy.assign(N, 0.0);
  if (Ux.size() != N || Uy.size() != N) throw ConfigError("current field does not match the grid");
  if (grid.dims() == 1 && max_abs(Uy) != 0.0) throw ConfigError("transverse current on a 1D grid");
  for (double v : b)
    if (!(v > 0.0)) throw ConfigError("depth must be positive everywhere");
  if (bulk) {
    if (grid.dims() != 1) throw ConfigError("bulk current descriptor is 1D only");
    if (bulk->profile.size() != N || bulk->profile_dx.size() != N || bulk->profile_dxx.size() != N)
      throw ConfigError("bulk current profile does not match the grid");
    const RField tr = bulk->surface_trace();
    for (std::size_t i = 0; i < N; ++i)
      if (std::abs(tr[i] - Ux[i]) > 1e-10) throw ConfigError("bulk current surface trace differs from surface current");
  }
  Environment env{grid, std::move(b), std::move(Ux), std::move(Uy), std::move(bulk), sponge, {}, g};
  env.damping = sponge_rate(grid, sponge);
  env.has_flow = max_abs(env.Ux) != 0.0 || max_abs(env.Uy) != 0.0;
  return env;
}

double spectral_tail(const Grid& g, const RField& f) {
  const CField fh = g.forward(f);
  double top = 0.0, tail = 0.0;
  for (std::size_t ix = 0; ix < g.n(0); ++ix) {
    for (std::size_t iy = 0; iy < g.n(1); ++iy) {
      const std::size_t i = g.index(ix, iy);
      const double a = std::abs(fh[i]);
      top = std::max(top, a);
      bool high = std::abs(g.kx()[i]) > g.kmax(0) * 2.0 / 3.0;
      if (g.dims() == 2) high = high || std::abs(g.ky()[i]) > g.kmax(1) * 2.0 / 3.0;
      if (high) tail = std::max(tail, a);
    }
  }
  return top > 0.0 ? tail / top : 0.0;
}

StateRate rhs(const WaveState& s, const Environment& env, const SeparableSymbol& dn) {
  const Grid& g = env.grid;
  const std::size_t N = g.size();
  if (s.eta.size() != N || s.phi.size() != N) throw GridMismatch("rhs: state does not match the environment grid");
  if (!dn.grid().same_shape(g)) throw GridMismatch("rhs: DN operator built on a different grid");

  StateRate r{dn_weyl_apply(dn, s.phi), RField(N)};
  for (std::size_t i = 0; i < N; ++i) r.dphi[i] = -env.g * s.eta[i];

  if (env.has_flow) {
    RField fx(N), fy(N);
    for (std::size_t i = 0; i < N; ++i) {
      fx[i] = env.Ux[i] * s.eta[i];
      fy[i] = env.Uy[i] * s.eta[i];
    }
    axpy(r.deta, -1.0, divergence(g, fx, fy));
    const RField px = gradient_x(g, s.phi);
    for (std::size_t i = 0; i < N; ++i) r.dphi[i] -= env.Ux[i] * px[i];
    if (g.dims() == 2) {
      const RField py = gradient_y(g, s.phi);
      for (std::size_t i = 0; i < N; ++i) r.dphi[i] -= env.Uy[i] * py[i];
    }
  }
  if (!env.damping.empty()) {
    for (std::size_t i = 0; i < N; ++i) {
      r.deta[i] -= env.damping[i] * s.eta[i];
      r.dphi[i] -= env.damping[i] * s.phi[i];
    }
  }
  return r;
}

double cfl_dt(const Environment& env, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("CFL safety factor must lie in (0, 1]");
  const double kmax = *std::max_element(env.grid.kabs().begin(), env.grid.kabs().end());
  const double wmax = env.max_speed() * kmax + sigma(kmax, env.bmax(), env.g);
  return safety * 2.8 / wmax;
}

double resolved_dt(const Environment& env, double omega_carrier, int steps_per_period, double safety) {
  const double dt = cfl_dt(env, safety);
  if (omega_carrier <= 0.0 || steps_per_period <= 0) return dt;
  return std::min(dt, 2.0 * kPi / (std::abs(omega_carrier) * steps_per_period));
}

WaveState step_rk4(const WaveState& s, const Environment& env, const SeparableSymbol& dn, double dt) {
  const std::size_t N = s.eta.size();
  auto stage = [&](const StateRate& k, double h) {
    WaveState y{s.eta, s.phi, s.t + h};
    axpy(y.eta, h, k.deta);
    axpy(y.phi, h, k.dphi);
    return y;
  };
  const StateRate k1 = rhs(s, env, dn);
  const StateRate k2 = rhs(stage(k1, 0.5 * dt), env, dn);
  const StateRate k3 = rhs(stage(k2, 0.5 * dt), env, dn);
  const StateRate k4 = rhs(stage(k3, dt), env, dn);
  WaveState out{s.eta, s.phi, s.t + dt};
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < N; ++i) {
    out.eta[i] += w * (k1.deta[i] + 2.0 * k2.deta[i] + 2.0 * k3.deta[i] + k4.deta[i]);
    out.phi[i] += w * (k1.dphi[i] + 2.0 * k2.dphi[i] + 2.0 * k3.dphi[i] + k4.dphi[i]);
  }
  if (!all_finite(out.eta) || !all_finite(out.phi)) {
    std::ostringstream msg;
    msg << "non-finite state after step to t=" << out.t << " (dt=" << dt << ", cfl dt=" << cfl_dt(env, 1.0)
        << ")";
    throw NumericalAbort(msg.str());
  }
  return out;
}

namespace {

void check_packet(const Grid& g, int axis, double sw) {
  if (sw < 4.0 * g.dx(axis)) throw ConfigError("packet width must cover at least 4 grid spacings");
}

}  // namespace

WaveState packet_ic(const Grid& g, double xc, double sw, double k0, double a) {
  if (g.dims() != 1) throw ConfigError("1D packet requested on a 2D grid");
  check_packet(g, 0, sw);
  if (std::abs(k0) >= 0.5 * g.kmax(0)) throw ConfigError("unresolved carrier: k0 must be below half the Nyquist wavenumber");
  WaveState s{RField(g.size()), RField(g.size(), 0.0), 0.0};
  const double L = g.length(0);
  for (std::size_t i = 0; i < g.n(0); ++i) {
    const double d = wrapped(g.coord(0, i), xc, L);
    s.eta[i] = a * std::exp(-d * d / (2.0 * sw * sw)) * std::cos(k0 * d);
  }
  return s;
}

WaveState packet_ic(const Grid& g, double xc, double yc, double swx, double swy, double k0, double a) {
  if (g.dims() != 2) throw ConfigError("2D packet requested on a 1D grid");
  check_packet(g, 0, swx);
  check_packet(g, 1, swy);
  if (std::abs(k0) >= 0.5 * g.kmax(0)) throw ConfigError("unresolved carrier: k0 must be below half the Nyquist wavenumber");
  WaveState s{RField(g.size()), RField(g.size(), 0.0), 0.0};
  for (std::size_t ix = 0; ix < g.n(0); ++ix) {
    const double dx = wrapped(g.coord(0, ix), xc, g.length(0));
    const double ex = a * std::exp(-dx * dx / (2.0 * swx * swx)) * std::cos(k0 * dx);
    for (std::size_t iy = 0; iy < g.n(1); ++iy) {
      const double dy = wrapped(g.coord(1, iy), yc, g.length(1));
      s.eta[g.index(ix, iy)] = ex * std::exp(-dy * dy / (2.0 * swy * swy));
    }
  }
  return s;
}

RField directional_potential(const Grid& g, const RField& eta, double b0, int direction, double gravity) {
  const CField eh = g.forward(eta);
  CField ph(eh.size(), 0.0);
  const double nyq = g.kmax(0);
  for (std::size_t i = 0; i < eh.size(); ++i) {
    const double kx = g.kx()[i];
    const double k = g.kabs()[i];
    if (k == 0.0 || std::abs(kx) >= nyq) continue;
    // phi_hat = -i sgn(kx) (g / sigma) eta_hat for a wave travelling toward +x
    const double s = (kx > 0 ? 1.0 : (kx < 0 ? -1.0 : 0.0)) * direction;
    ph[i] = cplx(0.0, -s * gravity / sigma(k, b0, gravity)) * eh[i];
  }
  return g.inverse_real(ph);
}

namespace {

// cosh(k(z+b))/cosh(kb) and k sinh(k(z+b))/cosh(kb) without overflow.
void vertical_multipliers(const Grid& g, double b0, double z, RField& c, RField& w) {
  const std::size_t N = g.size();
  c.assign(N, 1.0);
  w.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const double k = g.kabs()[i];
    if (k == 0.0) continue;
    const double e = std::exp(k * z);
    const double lo = std::exp(-2.0 * k * (z + b0));
    const double den = 1.0 + std::exp(-2.0 * k * b0);
    c[i] = e * (1.0 + lo) / den;
    w[i] = k * e * (1.0 - lo) / den;
  }
}

}  // namespace

BulkVelocity harmonic_extension(const Grid& g, const RField& phi, double b0, const std::vector<double>& z) {
  if (phi.size() != g.size()) throw GridMismatch("harmonic_extension: field does not match grid");
  if (!(b0 > 0.0)) throw ConfigError("harmonic_extension: depth must be positive");
  BulkVelocity out;
  out.z = z;
  RField c, wm;
  for (double zl : z) {
    if (zl > 1e-12 || zl < -b0 - 1e-12) throw ConfigError("harmonic_extension: level outside the water column");
    vertical_multipliers(g, b0, zl, c, wm);
    const RField pot = apply_multiplier(g, phi, c);
    out.u.push_back(gradient_x(g, pot));
    if (g.dims() == 2) out.v.push_back(gradient_y(g, pot));
    out.w.push_back(apply_multiplier(g, phi, wm));
  }
  return out;
}

BulkVelocity harmonic_extension(const Grid& g, const RField& phi, const RField& b, const std::vector<double>& z) {
  if (b.size() != g.size()) throw GridMismatch("harmonic_extension: depth does not match grid");
  const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
  if (*hi - *lo > 1e-12 * std::abs(*hi)) throw ConfigError("harmonic_extension supports a flat bottom only");
  return harmonic_extension(g, phi, *hi, z);
}

Checkpoint make_checkpoint(const WaveState& s, double dt, std::uint64_t scenario_hash) {
  return Checkpoint{s.t, dt, scenario_hash, s.eta, s.phi};
}

}  // namespace wavecore
