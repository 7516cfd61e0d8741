#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "wavecore/errors.hpp"
#include "wavecore/field_io.hpp"
#include "wavecore/grid.hpp"

using namespace wavecore;
using namespace testsupport;
constexpr double pi = std::numbers::pi;

TEST_CASE("grid construction enforces even counts of at least eight") {
  CHECK_THROWS_AS(Grid(1.0, 6), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 9), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 16), std::invalid_argument);
  Grid g(2000.0, 1024);
  CHECK(g.dx(0) == doctest::Approx(2000.0 / 1024));
  CHECK(g.kmax(0) == doctest::Approx(pi * 1024 / 2000.0));
  CHECK(g.kabs().size() == 1024);
}

TEST_CASE("wavenumbers follow the signed layout") {
  Grid g(2 * pi, 8);
  const double expect[8] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) CHECK(g.kx()[i] == doctest::Approx(expect[i]));
  Grid g2(2 * pi, 4 * pi, 8, 16);
  CHECK(g2.ky()[g2.index(0, 1)] == doctest::Approx(0.5));
  CHECK(g2.ky()[g2.index(0, 15)] == doctest::Approx(-0.5));
  CHECK(g2.kx()[g2.index(5, 3)] == doctest::Approx(-3.0));
}

TEST_CASE("round trip transforms reproduce random fields") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N01;
  for (auto* g : {new Grid(3.0, 64), new Grid(3.0, 5.0, 32, 16)}) {
    RField f(g->size());
    for (auto& v : f) v = N01(rng);
    const RField r = g->inverse_real(g->forward(f));
    CHECK(linf_diff(r, f) < 1e-12 * linf(f));
    // reality survives the round trip
    const CField c = g->inverse(g->forward(f));
    double im = 0.0;
    for (auto& v : c) im = std::max(im, std::abs(v.imag()));
    CHECK(im < 1e-12 * linf(f));
    delete g;
  }
}

TEST_CASE("Parseval identity") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N01;
  Grid g(7.0, 4.0, 16, 32);
  RField f(g.size());
  for (auto& v : f) v = N01(rng);
  const CField fh = g.forward(f);
  double a = 0.0, b = 0.0;
  for (double v : f) a += v * v;
  for (auto& v : fh) b += std::norm(v);
  CHECK(a == doctest::Approx(b / g.size()).epsilon(1e-12));
}

TEST_CASE("spectral derivative of a Fourier mode") {
  const double L = 3.7;
  Grid g(L, 64);
  RField f(g.size()), df(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    f[i] = std::sin(2 * pi * x / L);
    df[i] = (2 * pi / L) * std::cos(2 * pi * x / L);
  }
  CHECK(linf_diff(spectral_derivative(g, f, 0, 1), df) < 1e-12 * linf(df));
  RField c(g.size(), 4.2);
  CHECK(linf(spectral_derivative(g, c, 0, 3)) < 1e-12);
  CHECK_THROWS_AS(spectral_derivative(g, f, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(spectral_derivative(g, f, 0, 0), std::invalid_argument);
}

TEST_CASE("odd derivative of complex-promoted real data stays real") {
  std::mt19937_64 rng(3);
  Grid g(10.0, 64);
  const RField f = random_smooth(g, rng);
  CField c(f.begin(), f.end());
  c[g.n(0) / 2] += 0.0;
  const CField d = spectral_derivative(g, c, 0, 1);
  double im = 0.0, re = 0.0;
  for (auto& v : d) {
    im = std::max(im, std::abs(v.imag()));
    re = std::max(re, std::abs(v.real()));
  }
  CHECK(im < 1e-12 * re);
}

TEST_CASE("second derivative of a Gaussian agrees with centered differences at second order") {
  auto fd_error = [](std::size_t n) {
    const double L = 20.0;
    Grid g(L, n);
    RField f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.coord(0, i) - L / 2;
      f[i] = std::exp(-x * x);
    }
    const RField d2 = spectral_derivative(g, f, 0, 2);
    const double h = g.dx(0);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = (f[(i + 1) % n] - 2 * f[i] + f[(i + n - 1) % n]) / (h * h);
      e = std::max(e, std::abs(fd - d2[i]));
    }
    return e;
  };
  const double e1 = fd_error(128), e2 = fd_error(256);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("2D derivatives act on the right axis") {
  const double Lx = 4.0, Ly = 3.0;
  Grid g(Lx, Ly, 32, 16);
  RField f(g.size()), fy(g.size());
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      f[g.index(i, j)] = std::cos(2 * pi * x / Lx) * std::sin(4 * pi * y / Ly);
      fy[g.index(i, j)] = std::cos(2 * pi * x / Lx) * (4 * pi / Ly) * std::cos(4 * pi * y / Ly);
    }
  CHECK(linf_diff(spectral_derivative(g, f, 1, 1), fy) < 1e-12 * linf(fy));
}

TEST_CASE("multipliers: identity, eigenfunction and dense DFT oracle") {
  const double L = 50.0;
  const std::size_t n = 64;
  Grid g(L, n);
  std::mt19937_64 rng(17);
  const RField f = random_smooth(g, rng, 10);
  CHECK(linf_diff(apply_multiplier(g, f, RField(n, 1.0)), f) < 1e-13);

  const double k0 = 2 * pi * 3 / L;
  RField c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = std::cos(k0 * g.coord(0, i));
  const RField r = apply_multiplier(g, c, g.kabs());
  for (std::size_t i = 0; i < n; ++i) CHECK(r[i] == doctest::Approx(k0 * c[i]).epsilon(1e-12));

  // Dense oracle: M = F^{-1} diag(m) F with F built entry by entry.
  const double b = 4.0;
  RField m(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double k = g.kx()[q];
    m[q] = k * std::tanh(b * k);
  }
  const RField fast = apply_multiplier(g, f, m);
  for (std::size_t j = 0; j < n; ++j) {
    cplx acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      cplx fq = 0.0;
      for (std::size_t l = 0; l < n; ++l) fq += f[l] * std::polar(1.0, -2 * pi * double(q * l) / n);
      acc += std::polar(1.0, 2 * pi * double(q * j) / n) * m[q] * fq;
    }
    CHECK(std::abs(acc.real() / n - fast[j]) < 1e-11);
  }
  CHECK_THROWS_AS(apply_multiplier(g, f, RField(n + 2, 1.0)), GridMismatch);
}

TEST_CASE("derivative commutes with multipliers") {
  std::mt19937_64 rng(21);
  Grid g(30.0, 12.0, 32, 16);
  const RField f = random_smooth(g, rng);
  RField m(g.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-g.kabs()[i]);
  const RField a = spectral_derivative(g, apply_multiplier(g, f, m), 0, 1);
  const RField b = apply_multiplier(g, spectral_derivative(g, f, 0, 1), m);
  CHECK(linf_diff(a, b) < 1e-12 * linf(a));
}

TEST_CASE("interpolation: nodes, periodicity, fourth-order convergence") {
  const double L = 10.0;
  auto f = [&](double x) { return std::sin(2 * pi * x / L) + 0.3 * std::cos(4 * pi * x / L); };
  auto err = [&](std::size_t n) {
    Grid g(L, n);
    RField v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(g.coord(0, i));
    double e = 0.0;
    for (int q = 0; q < 997; ++q) {
      const double x = L * q / 997.0;
      e = std::max(e, std::abs(interpolate(g, v, x) - f(x)));
    }
    return e;
  };
  const double e1 = err(32), e2 = err(64), e3 = err(128);
  CHECK(std::log2(e1 / e2) > 3.7);
  CHECK(std::log2(e2 / e3) > 3.7);

  Grid g(L, 32);
  RField v(32);
  for (std::size_t i = 0; i < 32; ++i) v[i] = f(g.coord(0, i));
  for (std::size_t i = 0; i < 32; ++i) CHECK(interpolate(g, v, g.coord(0, i)) == doctest::Approx(v[i]).epsilon(1e-14));
  CHECK(interpolate(g, v, 1.234 + L) == doctest::Approx(interpolate(g, v, 1.234)).epsilon(1e-14));
  CHECK(interpolate(g, v, 1.234 - 3 * L) == doctest::Approx(interpolate(g, v, 1.234)).epsilon(1e-14));
  // midpoint of a resolved sine
  const double xm = 0.5 * (g.coord(0, 3) + g.coord(0, 4));
  CHECK(std::abs(interpolate(g, v, xm) - f(xm)) < 10 * std::pow(g.dx(0), 4));
}

TEST_CASE("2D interpolation reproduces a smooth field") {
  const double Lx = 6.0, Ly = 4.0;
  Grid g(Lx, Ly, 64, 64);
  auto f = [&](double x, double y) { return std::sin(2 * pi * x / Lx) * std::cos(2 * pi * y / Ly); };
  RField v(g.size());
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j) v[g.index(i, j)] = f(g.coord(0, i), g.coord(1, j));
  CHECK(interpolate(g, v, 1.3, 2.7) == doctest::Approx(f(1.3, 2.7)).epsilon(1e-5));
  CHECK(interpolate(g, v, g.coord(0, 5), g.coord(1, 9)) == doctest::Approx(v[g.index(5, 9)]).epsilon(1e-14));
}

TEST_CASE("binary field, checkpoint and CSV round trips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "wavecore_io_test";
  fs::create_directories(dir);
  Grid g(7.0, 3.0, 16, 8);
  std::mt19937_64 rng(1);
  const RField f = random_smooth(g, rng);
  write_field_binary((dir / "f.bin").string(), g, f);
  GridHeader h;
  const RField r = read_field_binary((dir / "f.bin").string(), &h);
  CHECK(h.dims == 2);
  CHECK(h.n[0] == 16);
  CHECK(h.n[1] == 8);
  CHECK(h.len[0] == 7.0);
  CHECK(r == f);
  CHECK(fs::file_size(dir / "f.bin") == 8 * (1 + 2 + 2) + 8 * g.size());

  Checkpoint c{12.5, 0.25, 0xdeadbeefULL, f, r};
  write_checkpoint((dir / "c.bin").string(), g, c);
  const Checkpoint c2 = read_checkpoint((dir / "c.bin").string());
  CHECK(c2.t == 12.5);
  CHECK(c2.dt == 0.25);
  CHECK(c2.scenario_hash == 0xdeadbeefULL);
  CHECK(c2.eta == f);

  RField x{0.0, 1.0}, y{2.0, 3.5};
  write_csv_columns((dir / "s.csv").string(), {"x", "y"}, {&x, &y});
  std::ifstream is(dir / "s.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y");
  std::getline(is, line);
  CHECK(line == "0,2");
  fs::remove_all(dir);
}
