#include "wavecore/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "wavecore/errors.hpp"
#include "wavecore/field_io.hpp"

namespace wavecore {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

bool inside(const Grid& g, const Vec2& X) {
  if (X[0] < 0.0 || X[0] >= g.length(0)) return false;
  if (g.dims() == 2 && (X[1] < 0.0 || X[1] >= g.length(1))) return false;
  return true;
}

RField zeros_if_1d(const Grid& g, const RField& f) { return g.dims() == 2 ? f : RField(g.size(), 0.0); }

}  // namespace

// ---------------------------------------------------------------- rays

RayMedium::RayMedium(const Environment& env) : env_(&env) {
  const Grid& g = env.grid;
  bx_ = gradient_x(g, env.b);
  uxx_ = gradient_x(g, env.Ux);
  uyx_ = gradient_x(g, env.Uy);
  by_ = zeros_if_1d(g, g.dims() == 2 ? gradient_y(g, env.b) : RField{});
  uxy_ = zeros_if_1d(g, g.dims() == 2 ? gradient_y(g, env.Ux) : RField{});
  uyy_ = zeros_if_1d(g, g.dims() == 2 ? gradient_y(g, env.Uy) : RField{});
}

RayMedium::Sample RayMedium::at(const Vec2& X) const {
  const Grid& g = env_->grid;
  const double x = X[0], y = X[1];
  Sample s{};
  s.b = interpolate(g, env_->b, x, y);
  s.bx = interpolate(g, bx_, x, y);
  s.U = {interpolate(g, env_->Ux, x, y), 0.0};
  s.Uxx = interpolate(g, uxx_, x, y);
  if (g.dims() == 2) {
    s.by = interpolate(g, by_, x, y);
    s.U[1] = interpolate(g, env_->Uy, x, y);
    s.Uxy = interpolate(g, uxy_, x, y);
    s.Uyx = interpolate(g, uyx_, x, y);
    s.Uyy = interpolate(g, uyy_, x, y);
  }
  return s;
}

double RayMedium::kmax() const {
  const Grid& g = env_->grid;
  return g.dims() == 2 ? std::hypot(g.kmax(0), g.kmax(1)) : g.kmax(0);
}

double RayMedium::omega(const RayState& r) const {
  const Sample s = at(r.X);
  return s.U[0] * r.k[0] + s.U[1] * r.k[1] + sigma(r.k, s.b, env_->g);
}

Vec2 RayMedium::velocity(const Vec2& X, const Vec2& k) const {
  const Sample s = at(X);
  const Vec2 cg = group_velocity(k, s.b, env_->g);
  return {s.U[0] + cg[0], s.U[1] + cg[1]};
}

RayRate ray_rhs(const RayState& r, const RayMedium& m) {
  const double ka = norm2(r.k);
  if (!(ka > 1e-6 * m.kmax())) throw NumericalAbort("ray wavenumber collapsed");
  const RayMedium::Sample s = m.at(r.X);
  const double gr = m.gravity();
  const Vec2 cg = group_velocity(r.k, s.b, gr);
  const double sb = sigma_db(ka, s.b, gr);
  RayRate out;
  out.dX = {s.U[0] + cg[0], s.U[1] + cg[1]};
  out.dk[0] = -(sb * s.bx + r.k[0] * s.Uxx + r.k[1] * s.Uyx);
  out.dk[1] = -(sb * s.by + r.k[0] * s.Uxy + r.k[1] * s.Uyy);

  const Grid& g = m.grid();
  double div = 0.0;
  for (int a = 0; a < g.dims(); ++a) {
    const double h = g.dx(a);
    Vec2 p = r.X, q = r.X;
    p[a] += h;
    q[a] -= h;
    div += (m.velocity(p, r.k)[a] - m.velocity(q, r.k)[a]) / (2.0 * h);
  }
  out.daction = -div * r.action;
  return out;
}

std::vector<double> RayTrajectory::energy() const {
  std::vector<double> e(samples.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = sigma[i] * samples[i].action;
  return e;
}

void RayTrajectory::write_csv(const std::string& path) const {
  std::vector<double> t, x, y, kx, ky, a;
  for (const RayState& r : samples) {
    t.push_back(r.t);
    x.push_back(r.X[0]);
    y.push_back(r.X[1]);
    kx.push_back(r.k[0]);
    ky.push_back(r.k[1]);
    a.push_back(r.action);
  }
  const std::vector<double> e = energy();
  write_csv_columns(path, {"t", "x", "y", "kx", "ky", "sigma", "action", "E"}, {&t, &x, &y, &kx, &ky, &sigma, &a, &e});
}

double ray_default_dt(const RayState& r0, const RayMedium& m) {
  const Grid& g = m.grid();
  // Shortest variation length of depth and current over the grid.
  double inv = 0.0;
  const double vmax = norm2(m.velocity(r0.X, r0.k));
  for (std::size_t ix = 0; ix < g.n(0); ++ix)
    for (std::size_t iy = 0; iy < g.n(1); ++iy) {
      const Vec2 X{g.coord(0, ix), g.dims() == 2 ? g.coord(1, iy) : 0.0};
      const RayMedium::Sample s = m.at(X);
      const double gb = std::hypot(s.bx, s.by) / s.b;
      const double gu = std::max({std::abs(s.Uxx), std::abs(s.Uxy), std::abs(s.Uyx), std::abs(s.Uyy)}) /
                        std::max(vmax, 1e-12);
      inv = std::max({inv, gb, gu});
    }
  const double L = g.dims() == 2 ? std::min(g.length(0), g.length(1)) : g.length(0);
  const double lgrad = inv > 0.0 ? std::min(1.0 / inv, L) : L;
  return 0.01 * lgrad / std::max(vmax, 1e-12);
}

RayTrajectory ray_trace(const RayState& r0, const RayMedium& m, double T, double dt, int sample_every) {
  if (!(T >= 0.0)) throw ConfigError("ray trace duration must be non-negative");
  if (sample_every < 1) throw ConfigError("ray sample interval must be at least 1");
  if (dt <= 0.0) dt = ray_default_dt(r0, m);
  const double gr = m.gravity();
  RayTrajectory tr;
  auto record = [&](const RayState& r) {
    tr.samples.push_back(r);
    tr.sigma.push_back(sigma(r.k, m.at(r.X).b, gr));
  };
  RayState r = r0;
  record(r);
  if (!inside(m.grid(), r.X)) {
    tr.stop = RayStop::ExitedDomain;
    return tr;
  }
  const long nsteps = static_cast<long>(std::ceil(T / dt - 1e-9));
  auto add = [](const RayState& s, const RayRate& k, double h) {
    RayState y = s;
    for (int a = 0; a < 2; ++a) {
      y.X[a] += h * k.dX[a];
      y.k[a] += h * k.dk[a];
    }
    y.action += h * k.daction;
    return y;
  };
  try {
    for (long n = 0; n < nsteps; ++n) {
      const double h = std::min(dt, T - r.t);
      const RayRate k1 = ray_rhs(r, m);
      const RayRate k2 = ray_rhs(add(r, k1, 0.5 * h), m);
      const RayRate k3 = ray_rhs(add(r, k2, 0.5 * h), m);
      const RayRate k4 = ray_rhs(add(r, k3, h), m);
      for (int a = 0; a < 2; ++a) {
        r.X[a] += h / 6.0 * (k1.dX[a] + 2.0 * k2.dX[a] + 2.0 * k3.dX[a] + k4.dX[a]);
        r.k[a] += h / 6.0 * (k1.dk[a] + 2.0 * k2.dk[a] + 2.0 * k3.dk[a] + k4.dk[a]);
      }
      r.action += h / 6.0 * (k1.daction + 2.0 * k2.daction + 2.0 * k3.daction + k4.daction);
      r.t += h;
      if (!inside(m.grid(), r.X)) {
        tr.stop = RayStop::ExitedDomain;
        record(r);
        return tr;
      }
      if ((n + 1) % sample_every == 0 || n + 1 == nsteps) record(r);
    }
  } catch (const NumericalAbort&) {
    tr.stop = RayStop::KCollapse;
  }
  return tr;
}

std::optional<double> turning_point(const RayTrajectory& tr, const RayMedium& m) {
  double prev = 0.0;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const RayState& r = tr.samples[i];
    const double v = m.velocity(r.X, r.k)[0];
    if (i > 0 && prev > 0.0 && v <= 0.0) {
      const double w = prev / (prev - v);
      return tr.samples[i - 1].X[0] + w * (r.X[0] - tr.samples[i - 1].X[0]);
    }
    prev = v;
  }
  return std::nullopt;
}

// ------------------------------------------------ steady wavenumber field

RField steady_wavenumber_field(const Environment& env, double omega0, Branch br, const RField& dir_x,
                               const RField& dir_y) {
  const Grid& g = env.grid;
  const std::size_t N = g.size();
  if (!dir_x.empty() && (dir_x.size() != N || dir_y.size() != N))
    throw GridMismatch("direction field does not match the grid");
  const double kcap = g.dims() == 2 ? std::hypot(g.kmax(0), g.kmax(1)) : g.kmax(0);
  RField k(N, 0.0);
  double row_start = -1.0, prev = -1.0;
  for (std::size_t ix = 0; ix < g.n(0); ++ix) {
    for (std::size_t iy = 0; iy < g.n(1); ++iy) {
      const std::size_t i = g.index(ix, iy);
      const double dx = dir_x.empty() ? 1.0 : dir_x[i];
      const double dy = dir_x.empty() ? 0.0 : dir_y[i];
      const double along = env.Ux[i] * dx + env.Uy[i] * dy;
      const double guess = iy == 0 ? row_start : prev;
      try {
        k[i] = solve_wavenumber(omega0, env.b[i], along, br, kcap, env.g, guess).kappa;
      } catch (const NoRoot& e) {
        throw NoRoot(std::string("steady wavenumber field: ") + e.what(), g.coord(0, ix));
      }
      prev = k[i];
      if (iy == 0) row_start = k[i];
    }
  }
  return k;
}

CarrierField carrier_field(const Environment& env, const RField& kmag, const RField& dir_x, const RField& dir_y) {
  const Grid& g = env.grid;
  const std::size_t N = g.size();
  if (kmag.size() != N) throw GridMismatch("wavenumber field does not match the grid");
  CarrierField c;
  c.kx.resize(N);
  c.ky.resize(N);
  c.sigma.resize(N);
  c.Vx.resize(N);
  c.Vy.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double dx = dir_x.empty() ? 1.0 : dir_x[i];
    const double dy = dir_x.empty() ? 0.0 : dir_y[i];
    const Vec2 k{kmag[i] * dx, kmag[i] * dy};
    c.kx[i] = k[0];
    c.ky[i] = k[1];
    c.sigma[i] = sigma(k, env.b[i], env.g);
    const Vec2 cg = group_velocity(k, env.b[i], env.g);
    c.Vx[i] = env.Ux[i] + cg[0];
    c.Vy[i] = env.Uy[i] + cg[1];
  }
  c.sigma_x = gradient_x(g, c.sigma);
  c.sigma_y = g.dims() == 2 ? gradient_y(g, c.sigma) : RField(N, 0.0);
  return c;
}

DirectionField ray_direction_field(const RayMedium& m, const RayState& seed, double T, double dt, double smooth) {
  const Grid& g = m.grid();
  const std::size_t N = g.size();
  const double k0 = norm2(seed.k);
  if (!(k0 > 0.0)) throw ConfigError("ray direction field: zero seed wavenumber");
  const Vec2 d0{seed.k[0] / k0, seed.k[1] / k0};
  DirectionField f{RField(N, d0[0]), RField(N, d0[1]), 1.0};
  if (g.dims() == 1) return f;

  const double w0 = m.omega(seed);
  if (dt <= 0.0) dt = ray_default_dt(seed, m);
  const double kcap = std::hypot(g.kmax(0), g.kmax(1));
  RField cx(N, 0.0), cy(N, 0.0), w(N, 0.0);
  auto cell = [&](double x, int axis) {
    const double n = static_cast<double>(g.n(axis));
    double j = std::round(x / g.dx(axis));
    j -= n * std::floor(j / n);
    return static_cast<std::size_t>(j) % g.n(axis);
  };
  for (std::size_t iy = 0; iy < g.n(1); ++iy) {
    RayState r;
    r.X = {seed.X[0], g.coord(1, iy)};
    const RayMedium::Sample s = m.at(r.X);
    double kappa;
    try {
      kappa = solve_wavenumber(w0, s.b, s.U[0] * d0[0] + s.U[1] * d0[1], Branch::Plus, kcap, m.gravity()).kappa;
    } catch (const NoRoot&) {
      continue;
    }
    r.k = {kappa * d0[0], kappa * d0[1]};
    const RayTrajectory tr = ray_trace(r, m, T, dt, 1);
    for (const RayState& q : tr.samples) {
      const double kq = norm2(q.k);
      if (!(kq > 0.0)) continue;
      const std::size_t i = g.index(cell(q.X[0], 0), cell(q.X[1], 1));
      cx[i] += q.k[0] / kq;
      cy[i] += q.k[1] / kq;
      w[i] += 1.0;
    }
  }
  std::size_t reached = 0;
  for (double v : w) reached += v > 0.0;
  f.coverage = static_cast<double>(reached) / static_cast<double>(N);

  RField filt(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double ax = g.kx()[i] * smooth * g.dx(0), ay = g.ky()[i] * smooth * g.dx(1);
    filt[i] = std::exp(-0.5 * (ax * ax + ay * ay));
  }
  cx = apply_multiplier(g, cx, filt);
  cy = apply_multiplier(g, cy, filt);
  w = apply_multiplier(g, w, filt);
  double wmax = 0.0;
  for (double v : w) wmax = std::max(wmax, v);
  const double wref = 1e-3 * wmax;
  for (std::size_t i = 0; i < N; ++i) {
    const double ww = std::max(w[i], 0.0);
    const double vx = cx[i] + std::max(wref - ww, 0.0) * d0[0];
    const double vy = cy[i] + std::max(wref - ww, 0.0) * d0[1];
    const double n = std::hypot(vx, vy);
    if (n > 0.0) {
      f.x[i] = vx / n;
      f.y[i] = vy / n;
    }
  }
  return f;
}

// ------------------------------------------------------ energy transport

ActionTransport::ActionTransport(const Environment& env, CarrierField carrier) : env_(&env), c_(std::move(carrier)) {
  const Grid& g = env.grid;
  if (c_.sigma.size() != g.size()) throw GridMismatch("carrier field does not match the grid");
  filter_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = std::pow(std::abs(g.kx()[i]) / g.kmax(0), 36);
    if (g.dims() == 2) s += std::pow(std::abs(g.ky()[i]) / g.kmax(1), 36);
    filter_[i] = std::exp(-36.0 * s);
  }
}

RField ActionTransport::rate(const RField& E) const {
  const Grid& g = env_->grid;
  const std::size_t N = g.size();
  RField fx(N), fy(N);
  for (std::size_t i = 0; i < N; ++i) {
    fx[i] = c_.Vx[i] * E[i];
    fy[i] = c_.Vy[i] * E[i];
  }
  RField r = divergence(g, fx, fy);
  for (std::size_t i = 0; i < N; ++i)
    r[i] = -r[i] + E[i] / c_.sigma[i] * (c_.Vx[i] * c_.sigma_x[i] + c_.Vy[i] * c_.sigma_y[i]);
  return r;
}

double ActionTransport::max_dt() const {
  const Grid& g = env_->grid;
  double v = 0.0;
  for (std::size_t i = 0; i < c_.Vx.size(); ++i) v = std::max(v, std::hypot(c_.Vx[i], c_.Vy[i]));
  double dx = g.dx(0);
  if (g.dims() == 2) dx = std::min(dx, g.dx(1));
  return 0.8 * dx / v;
}

RField ActionTransport::action(const RField& E) const {
  RField a(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) a[i] = E[i] / c_.sigma[i];
  return a;
}

ActionField ActionTransport::step(const ActionField& a, double dt) const {
  const Grid& g = env_->grid;
  if (a.E.size() != g.size()) throw GridMismatch("action field does not match the grid");
  if (dt > max_dt() * (1.0 + 1e-12)) throw ConfigError("action transport step violates the CFL limit");
  const std::size_t N = a.E.size();
  auto stage = [&](const RField& k, double h) {
    RField y = a.E;
    for (std::size_t i = 0; i < N; ++i) y[i] += h * k[i];
    return y;
  };
  const RField k1 = rate(a.E);
  const RField k2 = rate(stage(k1, 0.5 * dt));
  const RField k3 = rate(stage(k2, 0.5 * dt));
  const RField k4 = rate(stage(k3, dt));
  RField e = a.E;
  for (std::size_t i = 0; i < N; ++i) e[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  ActionField out{apply_multiplier(g, e, filter_), a.t + dt, a.clipped};
  double neg = 0.0;
  for (double& v : out.E)
    if (v < 0.0) {
      neg -= v;
      v = 0.0;
    }
  out.clipped += neg * g.cell_area();
  return out;
}

ActionField action_transport_step(const ActionField& a, const ActionTransport& tr, double dt) { return tr.step(a, dt); }

double energy_form_source(double E, double sigma_v, const Vec2& V, const Vec2& grad_sigma, double dt_sigma) {
  return E / sigma_v * (dt_sigma + V[0] * grad_sigma[0] + V[1] * grad_sigma[1]);
}

double current_form_source(double E, double sigma_v, const Vec2& U, const Vec2& grad_sigma, const Vec2& Cg,
                           const Vec2& grad_Uk) {
  return E / sigma_v * (U[0] * grad_sigma[0] + U[1] * grad_sigma[1] - Cg[0] * grad_Uk[0] - Cg[1] * grad_Uk[1]);
}

// ------------------------------------------------------ envelope equation

SchrodingerMedium schrodinger_medium(const Environment& env, const CarrierField& c, double mu) {
  const Grid& g = env.grid;
  const std::size_t N = g.size();
  SchrodingerMedium m;
  m.mu = mu;
  m.Vx = c.Vx;
  m.Vy = c.Vy;
  m.sigma = c.sigma;
  m.divV = divergence(g, c.Vx, c.Vy);
  m.source.resize(N);
  m.Dxx.resize(N);
  m.Dxy.resize(N);
  m.Dyy.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    m.source[i] = (c.Vx[i] * c.sigma_x[i] + c.Vy[i] * c.sigma_y[i]) / (2.0 * c.sigma[i]);
    const Mat2 D = diffraction_matrix({c.kx[i], c.ky[i]}, env.b[i], env.g);
    m.Dxx[i] = D.a11;
    m.Dxy[i] = D.a12;
    m.Dyy[i] = D.a22;
  }
  return m;
}

SchrodingerMedium schrodinger_medium(const Grid& g, const Vec2& V, const Mat2& D, double mu) {
  const std::size_t N = g.size();
  SchrodingerMedium m;
  m.mu = mu;
  m.Vx.assign(N, V[0]);
  m.Vy.assign(N, g.dims() == 2 ? V[1] : 0.0);
  m.divV.assign(N, 0.0);
  m.source.assign(N, 0.0);
  m.sigma.assign(N, 1.0);
  m.Dxx.assign(N, D.a11);
  m.Dxy.assign(N, D.a12);
  m.Dyy.assign(N, D.a22);
  return m;
}

CField schrodinger_rate(const Grid& g, const SchrodingerMedium& m, const CField& A) {
  const std::size_t N = g.size();
  if (A.size() != N || m.Vx.size() != N) throw GridMismatch("envelope field does not match the grid");
  const cplx I(0.0, 1.0);
  CField r(N);
  const CField ax = spectral_derivative(g, A, 0, 1);
  CField vax(N);
  for (std::size_t i = 0; i < N; ++i) vax[i] = m.Vx[i] * A[i];
  const CField dvax = spectral_derivative(g, vax, 0, 1);
  for (std::size_t i = 0; i < N; ++i) r[i] = -0.5 * (m.Vx[i] * ax[i] + dvax[i]) - m.source[i] * A[i];
  if (g.dims() == 1) {
    CField f(N);
    for (std::size_t i = 0; i < N; ++i) f[i] = m.Dxx[i] * ax[i];
    const CField d = spectral_derivative(g, f, 0, 1);
    for (std::size_t i = 0; i < N; ++i) r[i] += I * m.mu * d[i];
    return r;
  }
  const CField ay = spectral_derivative(g, A, 1, 1);
  CField vay(N), fx(N), fy(N);
  for (std::size_t i = 0; i < N; ++i) {
    vay[i] = m.Vy[i] * A[i];
    fx[i] = m.Dxx[i] * ax[i] + m.Dxy[i] * ay[i];
    fy[i] = m.Dxy[i] * ax[i] + m.Dyy[i] * ay[i];
  }
  const CField dvay = spectral_derivative(g, vay, 1, 1);
  const CField dfx = spectral_derivative(g, fx, 0, 1);
  const CField dfy = spectral_derivative(g, fy, 1, 1);
  for (std::size_t i = 0; i < N; ++i) r[i] += -0.5 * (m.Vy[i] * ay[i] + dvay[i]) + I * m.mu * (dfx[i] + dfy[i]);
  return r;
}

double schrodinger_max_dt(const Grid& g, const SchrodingerMedium& m) {
  double v = 0.0, d = 0.0;
  for (std::size_t i = 0; i < m.Vx.size(); ++i) {
    v = std::max(v, std::hypot(m.Vx[i], m.Vy[i]));
    // spectral radius of the symmetric 2x2 matrix
    const double mean = 0.5 * (m.Dxx[i] + m.Dyy[i]);
    const double rad = std::hypot(0.5 * (m.Dxx[i] - m.Dyy[i]), m.Dxy[i]);
    d = std::max(d, g.dims() == 2 ? std::abs(mean) + rad : std::abs(m.Dxx[i]));
  }
  const double kmax = g.dims() == 2 ? std::hypot(g.kmax(0), g.kmax(1)) : g.kmax(0);
  return 0.8 * 2.8 / (v * kmax + m.mu * d * kmax * kmax);
}

SchrodingerState schrodinger_step(const SchrodingerState& s, const Grid& g, const SchrodingerMedium& m, double dt) {
  if (dt > schrodinger_max_dt(g, m) * (1.0 + 1e-12)) throw ConfigError("envelope step violates the CFL limit");
  const std::size_t N = s.A.size();
  auto stage = [&](const CField& k, double h) {
    CField y = s.A;
    for (std::size_t i = 0; i < N; ++i) y[i] += h * k[i];
    return y;
  };
  const CField k1 = schrodinger_rate(g, m, s.A);
  const CField k2 = schrodinger_rate(g, m, stage(k1, 0.5 * dt));
  const CField k3 = schrodinger_rate(g, m, stage(k2, 0.5 * dt));
  const CField k4 = schrodinger_rate(g, m, stage(k3, dt));
  SchrodingerState out{s.A, s.t + dt};
  for (std::size_t i = 0; i < N; ++i) out.A[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  for (const cplx& v : out.A)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalAbort("non-finite envelope amplitude");
  return out;
}

CField schrodinger_kernel(const Grid& g, const CField& A0, const Vec2& V, const Mat2& D, double t, double mu) {
  if (A0.size() != g.size()) throw GridMismatch("envelope field does not match the grid");
  if (g.dims() == 2 ? D.a11 * D.a22 - D.a12 * D.a21 == 0.0 : D.a11 == 0.0)
    throw ConfigError("singular diffraction matrix");
  CField m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double kx = std::abs(g.kx()[i]) >= g.kmax(0) ? 0.0 : g.kx()[i];
    double ky = 0.0;
    if (g.dims() == 2) ky = std::abs(g.ky()[i]) >= g.kmax(1) ? 0.0 : g.ky()[i];
    const double q = D.a11 * kx * kx + 2.0 * D.a12 * kx * ky + D.a22 * ky * ky;
    const double phase = -(kx * V[0] + ky * V[1]) * t - mu * t * q;
    m[i] = std::polar(1.0, phase);
  }
  return apply_multiplier(g, A0, m);
}

double l2_squared(const Grid& g, const CField& A) {
  double s = 0.0;
  for (const cplx& v : A) s += std::norm(v);
  return s * g.cell_area();
}

// ------------------------------------------------------------ mild slope

namespace {

double kappa_at(double omega, double b, double kcap, double gravity, double guess = -1.0) {
  return solve_wavenumber(omega, b, 0.0, Branch::Plus, kcap, gravity, guess).kappa;
}

// phase speed times group speed
double ccg(double omega, double kappa, double b, double gravity) {
  return omega / kappa * sigma_dk(kappa, b, gravity);
}

}  // namespace

MildSlopeCoefficients mild_slope_coefficients(const Grid& g, double omega, const RField& b, double gravity) {
  if (b.size() != g.size()) throw GridMismatch("depth field does not match the grid");
  const double kcap = 10.0 * omega * omega / gravity + 10.0 * omega / std::sqrt(gravity * *std::min_element(b.begin(), b.end()));
  MildSlopeCoefficients out{RField(b.size()), RField(b.size())};
  double prev = -1.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.kappa0[i] = prev = kappa_at(omega, b[i], kcap, gravity, prev);
    out.c[i] = ccg(omega, out.kappa0[i], b[i], gravity);
  }
  return out;
}

MildSlopeSolution mild_slope_solve(const Grid& g, double omega_guess, const std::function<double(double)>& depth,
                                   int substeps, double gravity) {
  if (g.dims() != 1) throw ConfigError("mild-slope solve is 1D only");
  if (substeps < 1) throw ConfigError("mild-slope solve needs at least one substep per cell");
  const double L = g.length(0);
  const std::size_t N = g.n(0);
  const double h = g.dx(0) / substeps;

  struct Local {
    double kappa, c;
  };
  auto coeffs = [&](double omega, double x) {
    const double b = depth(x);
    const double kcap = 10.0 * omega * omega / gravity + 10.0 * omega / std::sqrt(gravity * b);
    const double k = kappa_at(omega, b, kcap, gravity);
    return Local{k, ccg(omega, k, b, gravity)};
  };

  // Integrates (psi, p = c psi') across one period; returns the unwrapped phase gain.
  auto shoot = [&](double omega, CField* nodes) {
    const Local l0 = coeffs(omega, 0.0);
    const double eps = 1e-4 * L;
    const Local lp = coeffs(omega, eps), lm = coeffs(omega, -eps);
    const double q0 = l0.c * l0.kappa;
    const double dq = (lp.c * lp.kappa - lm.c * lm.kappa) / (2.0 * eps);
    cplx psi = 1.0 / std::sqrt(q0);
    cplx p = l0.c * cplx(-0.5 * dq / q0, l0.kappa) * psi;
    double phase = 0.0;
    if (nodes) (*nodes)[0] = psi;
    Local a = l0;
    for (std::size_t j = 0; j < N; ++j) {
      for (int s = 0; s < substeps; ++s) {
        const double x = h * static_cast<double>(j * substeps + s);
        const Local m = coeffs(omega, x + 0.5 * h), b = coeffs(omega, x + h);
        auto f = [](const Local& l, cplx ps, cplx pp, cplx& dps, cplx& dpp) {
          dps = pp / l.c;
          dpp = -l.kappa * l.kappa * l.c * ps;
        };
        cplx d1, e1, d2, e2, d3, e3, d4, e4;
        f(a, psi, p, d1, e1);
        f(m, psi + 0.5 * h * d1, p + 0.5 * h * e1, d2, e2);
        f(m, psi + 0.5 * h * d2, p + 0.5 * h * e2, d3, e3);
        f(b, psi + h * d3, p + h * e3, d4, e4);
        const cplx next = psi + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
        p += h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4);
        phase += std::arg(next / psi);
        psi = next;
        a = b;
      }
      if (nodes && j + 1 < N) (*nodes)[j + 1] = psi;
    }
    return phase;
  };

  const double m = std::max(1.0, std::round(shoot(omega_guess, nullptr) / (2.0 * kPi)));
  const double target = 2.0 * kPi * m;
  double w0 = omega_guess, f0 = shoot(w0, nullptr) - target;
  double w1 = omega_guess * (1.0 - 0.5 * f0 / target), f1 = shoot(w1, nullptr) - target;
  for (int it = 0; it < 60 && std::abs(f1) > 1e-13 * target; ++it) {
    const double w2 = w1 - f1 * (w1 - w0) / (f1 - f0);
    w0 = w1;
    f0 = f1;
    w1 = w2;
    f1 = shoot(w1, nullptr) - target;
  }
  if (std::abs(f1) > 1e-9 * target) throw NonConvergence("mild-slope phase condition did not converge");
  MildSlopeSolution sol{CField(N), w1};
  shoot(w1, &sol.psi);
  return sol;
}

double mild_slope_residual(const CField& psi, double omega, const SeparableSymbol& dn, double gravity) {
  const CField gp = dn_weyl_apply(dn, psi);
  double num = 0.0, den = 0.0;
  const double w2 = omega * omega;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    num = std::max(num, std::abs(gravity * gp[i] - w2 * psi[i]));
    den = std::max(den, std::abs(w2 * psi[i]));
  }
  return num / den;
}

}  // namespace wavecore
