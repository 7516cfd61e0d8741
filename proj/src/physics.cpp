#include "wavecore/physics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wavecore/errors.hpp"

namespace wavecore {

namespace {

void check_depth(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("depth must be positive, got " + std::to_string(b));
}

// sech^2(q) without overflow for large q.
double sech2(double q) {
  const double e = std::exp(-2.0 * std::abs(q));
  const double d = 1.0 + e;
  return 4.0 * e / (d * d);
}

// Below this b|k| the Taylor forms are used.
constexpr double kSmallQ = 1e-3;

}  // namespace

double sigma(double kabs, double b, double g) {
  check_depth(b);
  kabs = std::abs(kabs);
  return std::sqrt(g * kabs * std::tanh(b * kabs));
}

double sigma(const Vec2& k, double b, double g) { return sigma(std::hypot(k[0], k[1]), b, g); }

double sigma_dk(double kabs, double b, double g) {
  check_depth(b);
  kabs = std::abs(kabs);
  const double q = b * kabs;
  if (q < kSmallQ) {
    const double q2 = q * q;
    return std::sqrt(g * b) * (1.0 - 0.5 * q2 + 19.0 / 72.0 * q2 * q2);
  }
  const double s = sigma(kabs, b, g);
  return g * (std::tanh(q) + q * sech2(q)) / (2.0 * s);
}

double sigma_dkk(double kabs, double b, double g) {
  check_depth(b);
  kabs = std::abs(kabs);
  const double q = b * kabs;
  if (q < kSmallQ) return b * std::sqrt(g * b) * (-q + 19.0 / 18.0 * q * q * q);
  const double s = sigma(kabs, b, g);
  const double f1 = g * (std::tanh(q) + q * sech2(q));
  const double f2 = 2.0 * g * b * sech2(q) * (1.0 - q * std::tanh(q));
  return f2 / (2.0 * s) - f1 * f1 / (4.0 * s * s * s);
}

double sigma_db(double kabs, double b, double g) {
  check_depth(b);
  kabs = std::abs(kabs);
  const double q = b * kabs;
  if (q < kSmallQ) {
    // sigma ~ sqrt(g/b) (q - q^3/6), differentiated in b at fixed k.
    return 0.5 * std::sqrt(g / b) * kabs * (1.0 - 5.0 / 6.0 * q * q);
  }
  return g * kabs * kabs * sech2(q) / (2.0 * sigma(kabs, b, g));
}

double group_speed(double kabs, double b, double g) { return sigma_dk(kabs, b, g); }

Vec2 group_velocity(const Vec2& k, double b, double g) {
  const double ka = std::hypot(k[0], k[1]);
  const double c = sigma_dk(ka, b, g);
  if (ka == 0.0) return {c, 0.0};  // shallow-water speed; direction undefined at k = 0
  return {c * k[0] / ka, c * k[1] / ka};
}

double doppler_omega(const Vec2& k, double b, const Vec2& U, Branch br, double g) {
  const double s = br == Branch::Plus ? 1.0 : -1.0;
  return U[0] * k[0] + U[1] * k[1] + s * sigma(k, b, g);
}

WavenumberSolve solve_wavenumber(double omega, double b, double U_along, Branch br, double kmax, double g,
                                 double guess) {
  check_depth(b);
  if (!(kmax > 0.0)) throw std::invalid_argument("solve_wavenumber: kmax must be positive");
  const double s = br == Branch::Plus ? 1.0 : -1.0;
  auto f = [&](double x) { return U_along * x + s * sigma(x, b, g) - omega; };
  auto fp = [&](double x) { return U_along + s * sigma_dk(x, b, g); };
  const double tol = 1e-12 * std::max(1.0, std::abs(omega));
  const double lo = 1e-8, hi = 10.0 * kmax;
  const double flo = f(lo);

  WavenumberSolve out;
  // Newton from the deep-water guess; accept only the first crossing away from f(lo).
  double x = guess > 0.0 ? guess : std::max(omega * omega / g, lo);
  for (int it = 0; it < 50; ++it) {
    const double fx = f(x);
    out.iterations = it + 1;
    if (std::abs(fx) < tol) {
      if (fp(x) * flo < 0.0 || flo == 0.0) {
        out.kappa = x;
        return out;
      }
      break;
    }
    const double d = fp(x);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double xn = x - fx / d;
    if (!(xn > 0.0) || xn > hi) break;
    x = xn;
  }

  // Bracketed fallback.
  out.used_bisection = true;
  double a = lo, c = hi;
  if (f(hi) * flo > 0.0) {
    // No sign change over the bracket: look for the extremum that could cross zero.
    const double dir = flo < 0.0 ? 1.0 : -1.0;
    double l = lo, r = hi;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = r - gr * (r - l), m2 = l + gr * (r - l);
    for (int it = 0; it < 200 && (r - l) > 1e-14 * r; ++it) {
      if (dir * f(m1) > dir * f(m2)) {
        r = m2;
        m2 = m1;
        m1 = r - gr * (r - l);
      } else {
        l = m1;
        m1 = m2;
        m2 = l + gr * (r - l);
      }
    }
    const double xm = 0.5 * (l + r);
    if (dir * f(xm) < 0.0) throw NoRoot("dispersion relation has no root (blocked wave)");
    c = xm;
  }
  double fa = flo;
  for (int it = 0; it < 400; ++it) {
    const double m = 0.5 * (a + c);
    const double fm = f(m);
    out.iterations += 1;
    if (std::abs(fm) < tol || (c - a) < 1e-15 * c) {
      out.kappa = m;
      return out;
    }
    if (fm * fa < 0.0) {
      c = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  throw NonConvergence("wavenumber solve did not converge");
}

double diffraction_1d(double kabs, double b, double g) {
  if (kabs == 0.0) throw std::invalid_argument("diffraction matrix undefined at k = 0");
  return 0.5 * sigma_dkk(kabs, b, g);
}

Mat2 diffraction_matrix(const Vec2& k, double b, double g) {
  const double ka = std::hypot(k[0], k[1]);
  if (ka == 0.0) throw std::invalid_argument("diffraction matrix undefined at k = 0");
  const double rad = 0.5 * sigma_dkk(ka, b, g);
  const double tan = 0.5 * sigma_dk(ka, b, g) / ka;
  const double c = k[0] / ka, s = k[1] / ka;
  Mat2 D;
  D.a11 = rad * c * c + tan * s * s;
  D.a22 = rad * s * s + tan * c * c;
  D.a12 = D.a21 = (rad - tan) * c * s;
  return D;
}

double depth_of_max_group_speed(double omega, double bmin, double bmax, double g) {
  if (!(bmin > 0.0 && bmax > bmin)) throw std::invalid_argument("depth range must satisfy 0 < bmin < bmax");
  // At fixed omega the wavenumber in depth b stays below omega^2/g * coth-bound; kmax only sizes the bracket.
  const double kcap = 10.0 * omega * omega / g + 10.0 * omega / std::sqrt(g * bmin);
  // Search in log-depth; ties go left because the speed is flat in deep water beyond the peak.
  auto speed = [&](double lb) {
    const double b = std::exp(lb);
    const double k = solve_wavenumber(omega, b, 0.0, Branch::Plus, kcap, g).kappa;
    return group_speed(k, b, g);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double l = std::log(bmin), r = std::log(bmax);
  double m1 = r - gr * (r - l), m2 = l + gr * (r - l);
  double f1 = speed(m1), f2 = speed(m2);
  for (int it = 0; it < 200 && (r - l) > 1e-13; ++it) {
    if (f1 >= f2) {
      r = m2;
      m2 = m1;
      f2 = f1;
      m1 = r - gr * (r - l);
      f1 = speed(m1);
    } else {
      l = m1;
      m1 = m2;
      f1 = f2;
      m2 = l + gr * (r - l);
      f2 = speed(m2);
    }
  }
  return std::exp(0.5 * (l + r));
}

}  // namespace wavecore
