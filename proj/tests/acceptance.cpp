// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by number; the exit status is nonzero if any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "wavecore/asymptotics.hpp"
#include "wavecore/diagnostics.hpp"
#include "wavecore/dn_operator.hpp"
#include "wavecore/physics.hpp"
#include "wavecore/runner.hpp"
#include "wavecore/wigner.hpp"

using namespace wavecore;
using namespace testsupport;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double wrapped(double x, double c, double L) {
  const double d = x - c;
  return d - L * std::floor(d / L + 0.5);
}

double rel_l2(const Grid& g, const CField& a, const CField& b) {
  CField d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return std::sqrt(l2_squared(g, d) / l2_squared(g, b));
}

CField gaussian(const Grid& g, double xc, double s, double yc = 0.0, double sy = 1.0) {
  CField a(g.size());
  for (std::size_t ix = 0; ix < g.n(0); ++ix)
    for (std::size_t iy = 0; iy < g.n(1); ++iy) {
      const double dx = wrapped(g.coord(0, ix), xc, g.length(0));
      double e = -dx * dx / (2.0 * s * s);
      if (g.dims() == 2) {
        const double dy = wrapped(g.coord(1, iy), yc, g.length(1));
        e -= dy * dy / (2.0 * sy * sy);
      }
      a[g.index(ix, iy)] = std::exp(e);
    }
  return a;
}

// 1. Single travelling mode over 10 periods on flat 9 m water.
Outcome dispersion() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(2000.0, 1024);
  const double b = 9.0, k0 = 2.0 * kPi / 40.0, a = 0.5;
  const double s = std::sqrt(kGravity * k0 * std::tanh(k0 * b));
  const Environment env = make_environment(g, RField(g.size(), b), RField(g.size(), 0.0));
  const SeparableSymbol dn = build_separable(g, env.b, 1.0, 1.0);
  WaveState st{RField(g.size()), RField(g.size()), 0.0};
  const RField x = g.x_table();
  for (std::size_t i = 0; i < g.size(); ++i) {
    st.eta[i] = a * std::cos(k0 * x[i]);
    st.phi[i] = kGravity * a / s * std::sin(k0 * x[i]);
  }
  const std::size_t m = 50;  // lattice index of k0
  const cplx c0 = g.forward(st.eta)[m];
  const int per_period = 128, periods = 10;
  const double dt = 2.0 * kPi / s / per_period;
  for (int n = 0; n < per_period * periods; ++n) st = step_rk4(st, env, dn, dt);
  const cplx c1 = g.forward(st.eta)[m];
  // Exact: c1 / c0 = exp(-i s t) with s t = 20 pi.
  const double phase_err = std::abs(std::arg(c1 / c0 * std::polar(1.0, s * st.t))) / (s * st.t);
  const double amp_err = std::abs(std::abs(c1) / std::abs(c0) - 1.0);
  const double secs = seconds_since(t0);
  return {phase_err < 5e-3 && amp_err < 1e-6 && secs < 5.0,
          fmt("phase error %.2e (< 5e-3), amplitude error %.2e (< 1e-6), dt = T/%d, %.2f s (< 5 s)", phase_err, amp_err,
              per_period, secs)};
}

// 2. Gaussian packet, same medium, no sponge, 1000 steps.
Outcome energy_conservation() {
  const Grid g(2000.0, 1024);
  const double b = 9.0, k0 = 2.0 * kPi / 40.0;
  const Environment env = make_environment(g, RField(g.size(), b), RField(g.size(), 0.0));
  const SeparableSymbol dn = build_separable(g, env.b, 1.0, 1.0);
  WaveState st = packet_ic(g, 1000.0, 80.0, k0, 0.5);
  const double dt = 2.0 * kPi / sigma(k0, b) / 256.0;
  const double e0 = total_energy(st, dn);
  double drift = 0.0;
  for (int n = 0; n < 1000; ++n) {
    st = step_rk4(st, env, dn, dt);
    drift = std::max(drift, std::abs(total_energy(st, dn) - e0) / e0);
  }
  return {drift < 1e-8, fmt("max relative drift %.2e over 1000 steps (< 1e-8), dt = T/256", drift)};
}

// 3. Weyl operator against the boundary-value oracle as the scale separation shrinks.
Outcome dn_order() {
  const auto t0 = std::chrono::steady_clock::now();
  const double Ls = 2.0 * kPi, delta = 0.05;
  const std::vector<double> mus{0.2, 0.1, 0.05};
  std::vector<double> err;
  for (double mu : mus) {
    const Grid g(Ls, 256);
    RField b(g.size()), f(g.size());
    const RField x = g.x_table();
    for (std::size_t i = 0; i < g.size(); ++i) {
      b[i] = 2.0 + delta * std::sin(x[i]);
      f[i] = std::exp(-std::pow((x[i] - Ls / 2.0) / 0.5, 2) / 2.0) * std::cos(x[i] / mu);
    }
    BvpOptions o;
    o.richardson = true;
    const BvpResult r = bvp_oracle(g, f, b, mu, o);
    const RField w = dn_weyl_apply(build_separable(g, b, 1.0, mu), f);
    err.push_back(mu * linf_diff(r.dn, w));
  }
  const double slope = loglog_slope(mus, err);
  const double secs = seconds_since(t0);
  return {slope >= 1.9 && secs < 60.0,
          fmt("errors %.2e %.2e %.2e, slope %.2f (>= 1.9), %.1f s (< 60 s)", err[0], err[1], err[2], slope, secs)};
}

// 4. Symmetry of the discrete operator on random smooth pairs.
Outcome self_adjoint() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  int pairs = 0;
  const Grid g1(2000.0, 512), g2(1500.0, 800.0, 64, 32);
  for (const Grid* g : {&g1, &g2}) {
    RField b(g->size());
    const RField x = g->x_table(), y = g->y_table();
    for (std::size_t i = 0; i < b.size(); ++i) {
      b[i] = 24.0 - 18.0 * std::exp(-std::pow((x[i] - 0.6 * g->length(0)) / (0.08 * g->length(0)), 2) / 2.0);
      if (g->dims() == 2) b[i] += 3.0 * std::cos(2.0 * kPi * y[i] / g->length(1));
    }
    const SeparableSymbol s = build_separable(*g, b, 1.0, 1.0);
    for (int t = 0; t < 50; ++t, ++pairs) {
      const RField u = random_smooth(*g, rng, 12), v = random_smooth(*g, rng, 12);
      const double a = inner(*g, u, dn_weyl_apply(s, v)), c = inner(*g, dn_weyl_apply(s, u), v);
      worst = std::max(worst, std::abs(a - c) / std::max(std::abs(a), std::abs(c)));
    }
  }
  return {worst < 1e-12, fmt("%d pairs, max |<u,Gv> - <Gu,v>| / |<u,Gv>| = %.2e (< 1e-12)", pairs, worst)};
}

// 5. Budget of the sheared-current scenario.
Outcome energy_budget() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_scenario(builtin_scenario("total_energy_1d"));
  const double secs = seconds_since(t0);
  if (!r.budget) return {false, "no energy budget produced"};
  const double mismatch = budget_check(*r.budget);
  double is = 0.0, ib = 0.0;
  for (std::size_t i = 0; i < r.budget->t.size(); ++i) {
    is = std::max(is, std::abs(r.budget->I_s[i]));
    ib = std::max(ib, std::abs(r.budget->I_b[i]));
  }
  return {mismatch <= 0.02 && is > ib && secs < 120.0,
          fmt("max |E_T - E~_T| / E_T(0) = %.2e (<= 0.02), max|I_s| %.3g > max|I_b| %.3g, %.1f s (< 120 s)", mismatch,
              is, ib, secs)};
}

// 6. Energy transport against the exact density over bumpy bathymetry and current.
Outcome action_vs_exact() {
  const Scenario s = builtin_scenario("bumpy_1d");
  const RunResult r = run_scenario(s, {.models = {"exact", "action"}});
  const Grid g = s.grid();
  const ModelComparison& c = *r.comparison;
  const auto& ex = r.density.at("exact");
  double tot = 0.0, mx = 0.0;
  int transit = 0;
  const double e0 = integrate(g, r.E0);
  for (std::size_t f = 0; f < ex.size(); ++f) {
    // Transit: the window holds at least half of the initial energy.
    double inside = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coord(0, i);
      if (x >= s.window[0] && x <= s.window[1]) inside += ex[f][i] * g.dx(0);
    }
    if (inside < 0.5 * e0) continue;
    ++transit;
    tot = std::max(tot, std::abs(c.col("total_action")[f] - c.col("total_exact")[f]));
    mx = std::max(mx, std::abs(c.col("max_action")[f] - c.col("max_exact")[f]) / c.col("max_exact")[f]);
  }
  return {transit > 10 && tot <= 0.05 && mx <= 0.10,
          fmt("%d transit frames: normalized totals differ by %.3f (<= 0.05), window maxima by %.3f (<= 0.10)", transit,
              tot, mx)};
}

// 7. Stationary energy ratio between two depths from the energy transport model.
Outcome shoaling() {
  const double L = 8000.0, w = 0.9;
  const Grid g(L, 2048);
  RField b(g.size());
  auto step = [](double x) { return 0.5 * (1.0 + std::tanh(x / 150.0)); };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    b[i] = 10.0 - 6.0 * (step(x - 3000.0) - step(x - 6500.0));
  }
  const Environment env = make_environment(g, b, {});
  ActionTransport tr(env, carrier_field(env, steady_wavenumber_field(env, w)));
  ActionField a{RField(g.size()), 0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    a.E[i] = step((x - 500.0) / 0.33) - step((x - 2500.0) / 0.33);
  }
  const double dt = 0.5 * tr.max_dt();
  while (a.t < 260.0) a = tr.step(a, dt);
  const double ratio = interpolate(g, a.E, 3600.0) / interpolate(g, a.E, 2600.0);
  // Independent wavenumbers from bisection on the dispersion relation.
  auto kappa = [&](double depth) {
    double lo = 1e-6, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      (kGravity * m * std::tanh(m * depth) < w * w ? lo : hi) = m;
    }
    return lo;
  };
  const double expect = group_speed(kappa(10.0), 10.0) / group_speed(kappa(4.0), 4.0);
  const double err = std::abs(ratio / expect - 1.0);
  return {err <= 0.02, fmt("E_b/E_a = %.4f, C_g,a/C_g,b = %.4f, relative error %.2e (<= 0.02)", ratio, expect, err)};
}

// 8. Envelope equation: exact propagator, dispersive decay, L2 conservation.
Outcome schrodinger() {
  const Grid g(2000.0, 512);
  const double b = 10.0, k0 = 0.1;
  const Mat2 D = diffraction_matrix({k0, 0.0}, b);
  const Vec2 V{group_speed(k0, b) + 0.3, 0.0};
  const SchrodingerMedium m = schrodinger_medium(g, V, D);
  SchrodingerState s{gaussian(g, 600.0, 50.0), 0.0};
  const CField A0 = s.A;
  for (int n = 0; n < 1000; ++n) s = schrodinger_step(s, g, m, 0.1);
  const double kern = rel_l2(g, s.A, schrodinger_kernel(g, A0, V, D, s.t));
  const double l2 = std::abs(l2_squared(g, s.A) / l2_squared(g, A0) - 1.0);

  const Grid big(2048.0, 2048.0, 512, 512);
  const Mat2 D2 = diffraction_matrix({0.1, 0.0}, b);
  const double sw = 10.0;
  const CField B0 = gaussian(big, 1024.0, sw, 1024.0, sw);
  const double tau = sw * sw / (2.0 * std::max(std::abs(D2.a11), std::abs(D2.a22)));
  std::vector<double> ts, peaks;
  for (double f = 5.0; f <= 20.0; f *= 1.2) {
    double p = 0.0;
    for (const cplx& v : schrodinger_kernel(big, B0, {0.0, 0.0}, D2, f * tau)) p = std::max(p, std::abs(v));
    ts.push_back(f * tau);
    peaks.push_back(p);
  }
  const double slope = loglog_slope(ts, peaks);
  return {kern < 1e-6 && std::abs(slope + 1.0) <= 0.05 && l2 < 1e-8,
          fmt("kernel mismatch %.2e (< 1e-6), 2D decay exponent %.3f (-1 +- 0.05), L2 drift %.2e (< 1e-8)", kern, slope,
              l2)};
}

// 9. Envelope equation against energy transport on the 2D jet.
Outcome diffraction() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_scenario(builtin_scenario("jet_2d"));
  const double secs = seconds_since(t0);
  const ModelComparison& c = *r.comparison;
  const std::size_t n = c.size(), from = n - n / 4;
  double ds = 0.0, da = 0.0;
  for (std::size_t f = from; f < n; ++f) {
    ds = std::max(ds, c.col("diff_schrodinger")[f]);
    da = std::max(da, c.col("diff_action")[f]);
  }
  const double ratio = ds / da;
  return {ratio <= 0.3 && secs < 600.0,
          fmt("final quarter (t >= %.0f s): max|E - E_S| %.3g, max|E - E_A| %.3g, ratio %.3f (<= 0.3), %.0f s (< 600 s)",
              c.col("t")[from], ds, da, ratio, secs)};
}

struct BlockingRun {
  RunResult r;
  Environment env;
};
const BlockingRun& blocking_run() {
  static const BlockingRun b = [] {
    const Scenario s = builtin_scenario("blocking_1d");
    return BlockingRun{run_scenario(s), build_environment(s)};
  }();
  return b;
}

// 10. Ray turning point, frequency along the ray, Wigner peak tracking.
Outcome blocking() {
  const BlockingRun& b = blocking_run();
  if (!b.r.turning_x || !b.r.ray || !b.r.wigner) return {false, "no turning point, ray or Wigner track"};
  const RayMedium m(b.env);
  const double w0 = m.omega(b.r.ray->samples.front());
  double dw = 0.0;
  for (const RayState& s : b.r.ray->samples) dw = std::max(dw, std::abs(m.omega(s) - w0) / std::abs(w0));
  const double xt = *b.r.turning_x, off = std::abs(xt / 1240.0 - 1.0);
  const double tracked = b.r.wigner->tracked_fraction;
  return {off <= 0.05 && dw <= 1e-8 && tracked >= 0.9,
          fmt("turning point %.1f m (1240 +- 5%%), omega drift %.2e (<= 1e-8), peak tracked in %.1f%% of %zu frames (>= 90%%)",
              xt, dw, 100.0 * tracked, b.r.wigner->peaks.size())};
}

// 11. Marginals on the blocking packet; Gaussian closed form.
Outcome wigner_marginals() {
  const BlockingRun& b = blocking_run();
  if (!b.r.wigner) return {false, "no Wigner track"};
  double ex = 0.0, ek = 0.0;
  for (double v : b.r.wigner->x_marginal_error) ex = std::max(ex, v);
  for (double v : b.r.wigner->k_marginal_error) ek = std::max(ek, v);

  const Grid g(2000.0, 1024);
  const double s = 40.0, x0 = 1000.0, k0 = 0.3;
  CField psi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.coord(0, i) - x0;
    psi[i] = std::exp(-d * d / (2.0 * s * s)) * std::polar(1.0, k0 * d);
  }
  const WignerGrid w = wigner_transform(g, psi);
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < w.x.size(); ++i)
    for (std::size_t n = 0; n < w.k.size(); ++n) {
      const double dx = w.x[i] - x0, dk = w.k[n] - k0;
      const double exact = s / std::sqrt(kPi) * std::exp(-dx * dx / (s * s) - s * s * dk * dk);
      err = std::max(err, std::abs(w.at(i, n) - exact));
      peak = std::max(peak, exact);
    }
  err /= peak;
  return {ex <= 1e-3 && ek <= 1e-3 && err <= 1e-4,
          fmt("blocking frames: x-marginal L1 error %.2e, k-marginal %.2e (<= 1e-3); Gaussian max error %.2e (<= 1e-4)",
              ex, ek, err)};
}

// 12. Time-harmonic mild-slope solution in the full operator.
double mild_residual(double b0, double A, double omega, double delta) {
  const double s = A / (delta * std::sqrt(std::exp(1.0))), L = 10.0 * s;
  const double k = solve_wavenumber(omega, b0, 0, Branch::Plus, 10.0).kappa;
  std::size_t N = 1;
  while (L / N > 2.0 * kPi / k / 32.0) N *= 2;
  const Grid g(L, N);
  auto depth = [&](double x) {
    const double y = wrapped(x, L / 2.0, L);
    return b0 - A * std::exp(-y * y / (2.0 * s * s));
  };
  RField b(N);
  for (std::size_t i = 0; i < N; ++i) b[i] = depth(g.coord(0, i));
  const MildSlopeSolution sol = mild_slope_solve(g, omega, depth, 32);
  return mild_slope_residual(sol.psi, sol.omega, build_separable(g, b, 1.0, 1.0));
}
Outcome mild_slope() {
  const double w = std::sqrt(kGravity * 0.1 * std::tanh(2.0));
  const std::vector<double> d{0.1, 0.05, 0.025};
  std::vector<double> r;
  for (double x : d) r.push_back(mild_residual(20.0, 10.0, w, x));
  const double slope = loglog_slope(d, r);
  return {slope >= 1.8, fmt("residuals %.2e %.2e %.2e over max slope 0.1, 0.05, 0.025: order %.2f (>= 1.8)", r[0], r[1],
                            r[2], slope)};
}

// 13. Depth of fastest group speed at fixed frequency.
Outcome group_velocity_max() {
  double worst = 0.0;
  std::string kb;
  for (double w : {0.3, 0.6, 1.0, 2.0}) {
    const double bstar = depth_of_max_group_speed(w, 0.01, 500.0);
    const double k = solve_wavenumber(w, bstar, 0.0, Branch::Plus, 100.0).kappa;
    worst = std::max(worst, std::abs(k * bstar / 1.2 - 1.0));
    kb += fmt(" %.4f", k * bstar);
  }
  return {worst <= 0.01, "kb at the maximum:" + kb + fmt(", max deviation from 1.2 %.2e (<= 0.01)", worst)};
}

// 14. Kinetic and potential shares of a narrow-band packet in a slowly varying medium.
Outcome equipartition() {
  const Grid g(2000.0, 1024);
  RField b(g.size()), U(g.size());
  const RField x = g.x_table();
  for (std::size_t i = 0; i < g.size(); ++i) {
    b[i] = 12.0 - 4.0 * std::cos(4.0 * kPi * x[i] / g.length(0));
    U[i] = 0.3 * std::sin(4.0 * kPi * x[i] / g.length(0));
  }
  const Environment env = make_environment(g, b, U);
  const SeparableSymbol dn = build_separable(g, b, 1.0, 1.0);
  const double k0 = 2.0 * kPi / 40.0;
  const double mu = (2.0 * kPi / k0) / (0.5 * g.length(0));  // wavelength over medium period
  WaveState st = packet_ic(g, 600.0, 100.0, k0, 0.5);
  st.phi = directional_potential(g, st.eta, interpolate(g, b, 600.0), +1);
  const double dt = resolved_dt(env, sigma(k0, env.bmax()) + k0 * 0.3, 32);
  double worst = 0.0;
  for (int n = 0; n <= 2000; ++n) {
    if (n % 200 == 0) {
      const double ep = integrate(g, potential_density(st)), ek = integrate(g, kinetic_density(st, dn));
      worst = std::max(worst, std::abs(ek - ep) / (ek + ep));
    }
    if (n < 2000) st = step_rk4(st, env, dn, dt);
  }
  return {worst <= 0.10, fmt("scale ratio %.3f, max |<e_K> - <e_P>| / <E> over %.0f s = %.2e (<= 0.10)", mu, st.t, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dispersion fidelity", dispersion},
      {"energy conservation", energy_conservation},
      {"DN operator order", dn_order},
      {"discrete self-adjointness", self_adjoint},
      {"total-energy budget", energy_budget},
      {"wave action vs exact energy", action_vs_exact},
      {"shoaling ratio", shoaling},
      {"envelope exactness and decay", schrodinger},
      {"diffraction advantage", diffraction},
      {"wave blocking", blocking},
      {"Wigner marginals", wigner_marginals},
      {"mild-slope residual", mild_slope},
      {"group-velocity maximum", group_velocity_max},
      {"equipartition", equipartition},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << o.detail
              << fmt(" [%.1f s]", seconds_since(t0)) << std::endl;
  }
  return failed ? 1 : 0;
}
