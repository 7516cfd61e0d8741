#pragma once
// Linear dispersion kinematics for gravity waves on a current over finite depth.

#include <array>

namespace wavecore {

inline constexpr double kGravity = 9.81;

using Vec2 = std::array<double, 2>;

struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
};

enum class Branch { Plus = 1, Minus = -1 };

// Intrinsic frequency sqrt(g|k| tanh(b|k|)).
double sigma(double kabs, double b, double g = kGravity);
double sigma(const Vec2& k, double b, double g = kGravity);

// d sigma / d|k| and d^2 sigma / d|k|^2.
double sigma_dk(double kabs, double b, double g = kGravity);
double sigma_dkk(double kabs, double b, double g = kGravity);
// d sigma / d b at fixed |k|.
double sigma_db(double kabs, double b, double g = kGravity);

double group_speed(double kabs, double b, double g = kGravity);
Vec2 group_velocity(const Vec2& k, double b, double g = kGravity);

double doppler_omega(const Vec2& k, double b, const Vec2& U, Branch br = Branch::Plus, double g = kGravity);

struct WavenumberSolve {
  double kappa = 0.0;
  int iterations = 0;
  bool used_bisection = false;
};

// Positive root of U_along*kappa + s*sigma(kappa,b) = omega (s = branch sign).
// kmax bounds the search bracket [1e-8, 10*kmax]. Throws NoRoot or NonConvergence.
WavenumberSolve solve_wavenumber(double omega, double b, double U_along, Branch br, double kmax,
                                 double g = kGravity, double guess = -1.0);

// Half the Hessian of sigma with respect to k.
Mat2 diffraction_matrix(const Vec2& k, double b, double g = kGravity);

// Depth at which the group speed of a wave of fixed frequency omega (no current)
// is largest, found by golden-section search over depth in [bmin, bmax].
double depth_of_max_group_speed(double omega, double bmin, double bmax, double g = kGravity);
double diffraction_1d(double kabs, double b, double g = kGravity);

}  // namespace wavecore
