#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "wavecore/dn_operator.hpp"
#include "wavecore/errors.hpp"
#include "wavecore/physics.hpp"

using namespace wavecore;
using namespace testsupport;
constexpr double pi = std::numbers::pi;

namespace {

RField ramp_depth(const Grid& g, double lo, double hi) {
  RField b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i) / g.length(0);
    b[i] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(2 * pi * x));
  }
  return b;
}

RField cosine(const Grid& g, double k) {
  RField f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::cos(k * g.coord(0, i));
  return f;
}

}  // namespace

TEST_CASE("flat DN multiplier") {
  Grid g(400.0, 256);
  CHECK(linf(dn_flat(g, RField(256, 3.0), 9.0)) < 1e-13);
  const double k0 = 2 * pi / 40;
  const RField c = cosine(g, k0);
  const RField r = dn_flat(g, c, 9.0);
  const double factor = k0 * std::tanh(9 * k0);
  CHECK(factor == doctest::Approx(0.13953).epsilon(1e-4));
  CHECK(linf_diff(r, [&] { RField v = c; for (auto& x : v) x *= factor; return v; }()) < 1e-13);
  CHECK_THROWS_AS(dn_flat(g, c, 0.0), std::invalid_argument);
  // semiclassical scaling: symbol |mu k| tanh(b |mu k|) / mu
  const RField rm = dn_flat(g, c, 9.0, 0.5);
  CHECK(rm[0] == doctest::Approx(0.5 * k0 * std::tanh(9 * 0.5 * k0) / 0.5).epsilon(1e-12));
}

TEST_CASE("separable symbol collapses for constant depth") {
  Grid g(400.0, 128);
  const SeparableSymbol s = build_separable(g, RField(128, 7.5), 1.0, 1.0);
  CHECK(s.rank() == 1);
  std::mt19937_64 rng(1);
  const RField f = random_smooth(g, rng, 12);
  CHECK(linf_diff(dn_weyl_apply(s, f), dn_flat(g, f, 7.5)) < 1e-12 * linf(dn_flat(g, f, 7.5)));
}

TEST_CASE("separable fit error on a 9..24 m ramp") {
  Grid g(2000.0, 256);
  const RField b = ramp_depth(g, 9.0, 24.0);
  for (double p : {1.0, 0.5}) {
    const SeparableSymbol s = build_separable(g, b, p, 1.0, 16);
    CHECK(s.rank() <= kMaxSeparableRank);
    CHECK(s.fit_error() < 1e-10);
    // independent check at every (grid depth, lattice wavenumber) pair
    const RField tab_lo = dn_power_table(g, 9.0, p, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 7) {
      const RField exact = dn_power_table(g, b[i], p, 1.0);
      for (std::size_t q = 0; q < g.size(); ++q) {
        double v = 0.0;
        for (int r = 0; r < s.rank(); ++r) v += s.depth_basis(r)[i] * s.wave_table(r)[q];
        const double scale = std::max(dn_power_table(g, 24.0, p, 1.0)[q], tab_lo[q]);
        if (scale > 0) worst = std::max(worst, std::abs(v - exact[q]) / scale);
      }
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("square-root symbol is regularized only at the origin") {
  Grid g(1000.0, 64);
  const RField t = dn_power_table(g, 10.0, 0.5, 1.0);
  const double k1 = g.kmin();
  CHECK(t[0] == doctest::Approx(std::sqrt(k1 * std::tanh(10 * k1))).epsilon(1e-14));
  for (std::size_t q = 1; q < 64; ++q)
    CHECK(t[q] == doctest::Approx(std::sqrt(dn_symbol(g.kabs()[q], 10.0, 1.0))).epsilon(1e-14));
}

TEST_CASE("rank limit is reported") {
  Grid g(50000.0, 4096);
  const RField b = ramp_depth(g, 0.05, 4000.0);
  CHECK_THROWS_AS(build_separable(g, b, 1.0, 1.0, 8), RankInsufficient);
  CHECK_THROWS_AS(build_separable(g, RField(4096, 1.0), 1.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("Weyl operator is self-adjoint and positive (property)") {
  std::mt19937_64 rng(42);
  for (auto* g : {new Grid(1000.0, 256), new Grid(1500.0, 800.0, 64, 32)}) {
    RField b(g->size());
    const RField x = g->x_table(), y = g->y_table();
    for (std::size_t i = 0; i < b.size(); ++i)
      b[i] = 15.0 - 6.0 * std::exp(-std::pow((x[i] - 0.5 * g->length(0)) / (0.1 * g->length(0)), 2)) +
             2.0 * std::sin(2 * pi * y[i] / g->length(1));
    const SeparableSymbol s = build_separable(*g, b, 1.0, 1.0);
    for (int t = 0; t < 25; ++t) {
      const RField u = random_smooth(*g, rng, 12), v = random_smooth(*g, rng, 12);
      const RField Gu = dn_weyl_apply(s, u), Gv = dn_weyl_apply(s, v);
      const double a = inner(*g, u, Gv), c = inner(*g, Gu, v);
      CHECK(std::abs(a - c) < 1e-12 * (l2(*g, u) * l2(*g, Gv)));
      CHECK(inner(*g, u, Gu) >= 0.0);
    }
    delete g;
  }
}

TEST_CASE("breaking the symmetrization breaks self-adjointness") {
  Grid g(1000.0, 128);
  SeparableSymbol s = build_separable(g, ramp_depth(g, 5.0, 20.0), 1.0, 1.0);
  s.set_break_symmetry(true);
  std::mt19937_64 rng(9);
  const RField u = random_smooth(g, rng, 12), v = random_smooth(g, rng, 12);
  const double a = inner(g, u, dn_weyl_apply(s, v)), c = inner(g, dn_weyl_apply(s, u), v);
  CHECK(std::abs(a - c) > 1e-8 * std::abs(a));
}

TEST_CASE("dense midpoint oracle") {
  Grid g(400.0, 64);
  SUBCASE("constant depth gives the circulant flat multiplier") {
    const DenseWeyl d = dense_weyl_oracle(g, RField(64, 9.0), 1.0, 1.0);
    std::mt19937_64 rng(2);
    const RField f = random_smooth(g, rng, 10);
    Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), 64);
    Eigen::VectorXd r = d.G * fv;
    const RField ref = dn_flat(g, f, 9.0);
    for (int i = 0; i < 64; ++i) CHECK(std::abs(r[i] - ref[i]) < 1e-12);
    const double k0 = 2 * pi * 4 / 400.0;
    const RField c = cosine(g, k0);
    Eigen::VectorXd cr = d.G * Eigen::Map<const Eigen::VectorXd>(c.data(), 64);
    for (int i = 0; i < 64; ++i) CHECK(cr[i] == doctest::Approx(k0 * std::tanh(9 * k0) * c[i]).epsilon(1e-10));
  }
  SUBCASE("smooth depth: Hermitian and close to the separable form") {
    RField b(64);
    for (std::size_t i = 0; i < 64; ++i) b[i] = 20.0 + 0.05 * 400.0 / (2 * pi) * std::sin(2 * pi * g.coord(0, i) / 400.0);
    const DenseWeyl d = dense_weyl_oracle(g, b, 1.0, 1.0);
    CHECK(d.asymmetry < 1e-10);
    const SeparableSymbol s = build_separable(g, b, 1.0, 1.0);
    std::mt19937_64 rng(3);
    const RField f = random_smooth(g, rng, 10);
    const RField fast = dn_weyl_apply(s, f);
    Eigen::VectorXd r = d.G * Eigen::Map<const Eigen::VectorXd>(f.data(), 64);
    double e = 0.0;
    for (int i = 0; i < 64; ++i) e = std::max(e, std::abs(r[i] - fast[i]));
    CHECK(e < 1e-3 * linf(fast));
  }
  CHECK_THROWS_AS(dense_weyl_oracle(Grid(1.0, 8192), RField(8192, 1.0), 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("wave-packet action matches the leading expansion with a second-order remainder") {
  // Stretch the medium and envelope by 1/m; the remainder should fall like m^2.
  auto remainder = [](double m) {
    const double L0 = 2000.0, k0 = 2 * pi / 50.0;
    const double L = L0 / m;
    const std::size_t N = static_cast<std::size_t>(std::llround(512 / m));
    Grid g(L, N);
    RField b(N);
    CField eta(N);
    RField A(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double x = g.coord(0, i);
      b[i] = 12.0 + 4.0 * std::cos(2 * pi * x / L);
      A[i] = std::exp(-std::pow((x - 0.5 * L) / (0.08 * L), 2));
    }
    const double kk = 2 * pi * std::round(k0 * L / (2 * pi)) / L;
    for (std::size_t i = 0; i < N; ++i) eta[i] = A[i] * std::polar(1.0, kk * g.coord(0, i));
    const SeparableSymbol s = build_separable(g, b, 1.0, 1.0);
    const CField Ge = dn_weyl_apply(s, eta);
    RField sc(N), Ax = gradient_x(g, A);
    for (std::size_t i = 0; i < N; ++i) sc[i] = sigma(kk, b[i]) * group_speed(kk, b[i]);
    const RField scx = gradient_x(g, sc);
    double rem = 0.0, lead = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sg = sigma(kk, b[i]);
      const cplx expansion = std::polar(1.0, kk * g.coord(0, i)) *
                             cplx(sg * sg * A[i], -2.0 * sc[i] * Ax[i] - scx[i] * A[i]);
      rem = std::max(rem, std::abs(9.81 * Ge[i] - expansion));
      lead = std::max(lead, sg * sg * A[i]);
    }
    return rem / lead;
  };
  const double r1 = remainder(1.0), r2 = remainder(0.5), r3 = remainder(0.25);
  CHECK(r1 < 1e-2);
  CHECK(std::log2(r1 / r2) > 1.7);
  CHECK(std::log2(r2 / r3) > 1.7);
}

TEST_CASE("square root composed with itself approximates the full operator at second order") {
  auto gap = [](double mu) {
    const double Ls = 2 * pi;
    Grid g(Ls, 256);
    RField b(256), f(256);
    for (std::size_t i = 0; i < 256; ++i) {
      const double x = g.coord(0, i);
      b[i] = 2.0 + 0.05 * std::sin(x);
      f[i] = std::exp(-std::pow((x - Ls / 2) / 0.5, 2) / 2) * std::cos(x / mu);
    }
    const SeparableSymbol s1 = build_separable(g, b, 1.0, mu);
    const SeparableSymbol sh = build_separable(g, b, 0.5, mu);
    const RField a = dn_weyl_apply(sh, dn_weyl_apply(sh, f));
    const RField c = dn_weyl_apply(s1, f);
    return mu * linf_diff(a, c) / (mu * linf(c));
  };
  const double e1 = gap(0.2), e2 = gap(0.1), e3 = gap(0.05);
  CHECK(loglog_slope({0.2, 0.1, 0.05}, {e1, e2, e3}) > 1.8);
}

TEST_CASE("boundary-value oracle on a flat bottom") {
  const double L = 400.0, b0 = 9.0;
  Grid g(L, 128);
  const double k0 = 2 * pi / 40;
  RField f(128);
  for (std::size_t i = 0; i < 128; ++i) f[i] = std::cos(k0 * g.coord(0, i)) + 0.3 * std::sin(3 * k0 * g.coord(0, i));
  const RField exact = dn_flat(g, f, b0);
  const RField bb(128, b0);
  BvpOptions o;
  o.nz = 64;
  const BvpResult r64 = bvp_oracle(g, f, bb, 1.0, o);
  o.nz = 128;
  const BvpResult r128 = bvp_oracle(g, f, bb, 1.0, o);
  const double e64 = linf_diff(r64.dn, exact), e128 = linf_diff(r128.dn, exact);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(r64.iterations <= 2);
  o.nz = 256;
  o.richardson = true;
  const BvpResult rr = bvp_oracle(g, f, bb, 1.0, o);
  CHECK(linf_diff(rr.dn, exact) < 1e-8 * linf(exact));
}

TEST_CASE("boundary-value oracle agrees with the Weyl operator on gentle bathymetry") {
  const double Ls = 2 * pi, mu = 0.1;
  Grid g(Ls, 128);
  RField b(128), f(128);
  for (std::size_t i = 0; i < 128; ++i) {
    const double x = g.coord(0, i);
    b[i] = 2.0 + 0.05 * std::sin(x);
    f[i] = std::exp(-std::pow((x - Ls / 2) / 0.5, 2) / 2) * std::cos(x / mu);
  }
  BvpOptions o;
  o.richardson = true;
  const BvpResult r = bvp_oracle(g, f, b, mu, o);
  const RField w = dn_weyl_apply(build_separable(g, b, 1.0, mu), f);
  CHECK(linf_diff(r.dn, w) < 1e-3 * linf(w));
  CHECK(r.residual < 1e-12);
}

TEST_CASE("2D separable operator reduces to the 1D operator on ridge-aligned data") {
  // b and f depend on s = x + y only; the 2D operator must agree with a 1D grid along the diagonal.
  const double L = 800.0;
  const std::size_t N = 64;
  Grid g2(L, L, N, N);
  Grid g1(L / std::sqrt(2.0), N);
  auto B = [&](double s) { return 12.0 + 5.0 * std::sin(2 * pi * s / L); };
  auto F = [&](double s) { return std::cos(2 * pi * 6 * s / L) * std::exp(std::cos(2 * pi * s / L)); };
  RField b2(g2.size()), f2(g2.size()), b1(N), f1(N);
  for (std::size_t i = 0; i < N; ++i) {
    b1[i] = B(i * L / N);
    f1[i] = F(i * L / N);
    for (std::size_t j = 0; j < N; ++j) {
      const double s = (i + j) * L / N;
      b2[g2.index(i, j)] = B(s);
      f2[g2.index(i, j)] = F(s);
    }
  }
  const RField r1 = dn_weyl_apply(build_separable(g1, b1, 1.0, 1.0), f1);
  const RField r2 = dn_weyl_apply(build_separable(g2, b2, 1.0, 1.0), f2);
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i) e = std::max(e, std::abs(r2[g2.index(i, 0)] - r1[i]));
  CHECK(e < 1e-7 * linf(r1));
}

TEST_CASE("curvature correction brings the fast form onto the midpoint rule") {
  const double Ls = 2 * pi, mu = 0.1;
  Grid g(Ls, 128);
  RField b(128), f(128);
  for (std::size_t i = 0; i < 128; ++i) {
    const double x = g.coord(0, i);
    b[i] = 2.0 + 0.05 * std::sin(x);
    f[i] = std::exp(-std::pow((x - Ls / 2) / 0.5, 2) / 2) * std::cos(x / mu);
  }
  const DenseWeyl d = dense_weyl_oracle(g, b, 1.0, mu);
  const Eigen::VectorXd ref = d.G * Eigen::Map<const Eigen::VectorXd>(f.data(), 128);
  auto gap = [&](bool second) {
    const RField w = dn_weyl_apply(build_separable(g, b, 1.0, mu, 8, second), f);
    double e = 0.0;
    for (int i = 0; i < 128; ++i) e = std::max(e, std::abs(w[i] - ref[i]));
    return e;
  };
  CHECK(gap(true) < 0.1 * gap(false));
}
