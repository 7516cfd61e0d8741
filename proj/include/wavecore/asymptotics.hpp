#pragma once
// Asymptotic models: rays, steady wavenumber fields, energy transport,
// the envelope (Schrodinger) equation and the mild-slope check.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavecore/dn_operator.hpp"
#include "wavecore/physics.hpp"
#include "wavecore/solver.hpp"

namespace wavecore {

// ---------------------------------------------------------------- rays

struct RayState {
  Vec2 X{0.0, 0.0};
  Vec2 k{0.0, 0.0};
  double action = 1.0;
  double t = 0.0;
};

struct RayRate {
  Vec2 dX{0.0, 0.0};
  Vec2 dk{0.0, 0.0};
  double daction = 0.0;
};

// Depth, current and their spectral gradients, sampled by periodic cubic
// interpolation between nodes.
class RayMedium {
 public:
  explicit RayMedium(const Environment& env);

  struct Sample {
    double b, bx, by;
    Vec2 U;
    double Uxx, Uxy, Uyx, Uyy;  // d U_i / d x_j as U<i><j>
  };
  Sample at(const Vec2& X) const;
  const Grid& grid() const { return env_->grid; }
  double gravity() const { return env_->g; }
  double kmax() const;
  double omega(const RayState& r) const;
  // U + C_g at X for a fixed wavenumber.
  Vec2 velocity(const Vec2& X, const Vec2& k) const;

 private:
  const Environment* env_;
  RField bx_, by_, uxx_, uxy_, uyx_, uyy_;
};

RayRate ray_rhs(const RayState& r, const RayMedium& m);

enum class RayStop { Completed, ExitedDomain, KCollapse };

struct RayTrajectory {
  std::vector<RayState> samples;
  std::vector<double> sigma;
  RayStop stop = RayStop::Completed;

  std::vector<double> energy() const;
  void write_csv(const std::string& path) const;
};

// 0.01 L_grad / |dX/dt| at the initial state.
double ray_default_dt(const RayState& r0, const RayMedium& m);

// Fixed-step RK4. Leaving [0,L) ends the trace with ExitedDomain.
RayTrajectory ray_trace(const RayState& r0, const RayMedium& m, double T, double dt = -1.0,
                        int sample_every = 1);

// First time index at which dX/dt changes sign from positive to negative;
// returns the linearly interpolated x position, or nullopt.
std::optional<double> turning_point(const RayTrajectory& tr, const RayMedium& m);

// ------------------------------------------------ steady wavenumber field

// |k| solving U.d |k| + sigma(|k|, b) = omega0 at each node, d the unit
// direction (+x in 1D unless dir_x/dir_y given). Throws NoRoot carrying the x
// location of the first failure.
RField steady_wavenumber_field(const Environment& env, double omega0, Branch br = Branch::Plus,
                               const RField& dir_x = {}, const RField& dir_y = {});

// Local propagation quantities for a steady wavenumber field.
struct CarrierField {
  RField kx, ky;      // wavenumber vector
  RField sigma;       // intrinsic frequency
  RField Vx, Vy;      // U + C_g
  RField sigma_x, sigma_y;
};

CarrierField carrier_field(const Environment& env, const RField& kmag, const RField& dir_x = {},
                           const RField& dir_y = {});

// Unit carrier direction from a fan of rays with the seed's frequency and
// direction, launched at the seed's x across every grid row and traced for T
// seconds. Ray directions are binned to cells and smoothed over `smooth`
// cells; cells no ray reaches keep the seed direction. 1D: the seed direction.
struct DirectionField {
  RField x, y;
  double coverage = 0.0;  // fraction of cells reached by a ray
};
DirectionField ray_direction_field(const RayMedium& m, const RayState& seed, double T, double dt = -1.0,
                                   double smooth = 3.0);

// ------------------------------------------------------ energy transport

struct ActionField {
  RField E;
  double t = 0.0;
  double clipped = 0.0;  // integral of negative mass removed so far
};

class ActionTransport {
 public:
  ActionTransport(const Environment& env, CarrierField carrier);
  // dE/dt = -div(V E) + (E/sigma) V.grad(sigma)
  RField rate(const RField& E) const;
  ActionField step(const ActionField& a, double dt) const;
  double max_dt() const;  // 0.8 dx / max|V|
  RField action(const RField& E) const;
  const CarrierField& carrier() const { return c_; }
  const Grid& grid() const { return env_->grid; }

 private:
  const Environment* env_;
  CarrierField c_;
  RField filter_;
};

ActionField action_transport_step(const ActionField& a, const ActionTransport& tr, double dt);

// Right-hand side (E/sigma)(d_t sigma + V.grad sigma) of the energy-form action law.
double energy_form_source(double E, double sigma, const Vec2& V, const Vec2& grad_sigma, double dt_sigma = 0.0);
// The same source written through the current and its gradient:
// (E/sigma)(U.grad sigma - C_g.grad(U.k)).
double current_form_source(double E, double sigma, const Vec2& U, const Vec2& grad_sigma, const Vec2& Cg,
                           const Vec2& grad_Uk);

// ------------------------------------------------------ envelope equation

struct SchrodingerState {
  CField A;
  double t = 0.0;
};

struct SchrodingerMedium {
  RField Vx, Vy, divV, source;    // source = V.grad(sigma)/(2 sigma)
  RField Dxx, Dxy, Dyy;           // half Hessian of sigma in k
  RField sigma;
  double mu = 1.0;                // diffraction multiplier
};

SchrodingerMedium schrodinger_medium(const Environment& env, const CarrierField& c, double mu = 1.0);
// Uniform medium for kernel comparisons.
SchrodingerMedium schrodinger_medium(const Grid& g, const Vec2& V, const Mat2& D, double mu = 1.0);

// dA/dt = -(V.grad A + div(V A))/2 - source A + i mu div(D grad A)
CField schrodinger_rate(const Grid& g, const SchrodingerMedium& m, const CField& A);
SchrodingerState schrodinger_step(const SchrodingerState& s, const Grid& g, const SchrodingerMedium& m, double dt);
double schrodinger_max_dt(const Grid& g, const SchrodingerMedium& m);

// Exact propagator exp(-i k.V t - i mu t k^T D k) of the constant-medium
// equation. 2D requires det D != 0, 1D requires D.a11 != 0.
CField schrodinger_kernel(const Grid& g, const CField& A0, const Vec2& V, const Mat2& D, double t, double mu = 1.0);

// Continuous L2 norm squared of a complex field.
double l2_squared(const Grid& g, const CField& A);

// ------------------------------------------------------------ mild slope

struct MildSlopeCoefficients {
  RField kappa0, c;
};

MildSlopeCoefficients mild_slope_coefficients(const Grid& g, double omega, const RField& b, double gravity = kGravity);

// Right-going periodic solution of (c psi')' + kappa0^2 c psi = 0 on a 1D
// periodic depth profile. The frequency is adjusted from omega_guess so that
// the accumulated phase over one period is 2 pi m. Returns psi and the
// adjusted frequency.
struct MildSlopeSolution {
  CField psi;
  double omega = 0.0;
};
MildSlopeSolution mild_slope_solve(const Grid& g, double omega_guess, const std::function<double(double)>& depth,
                                   int substeps = 16, double gravity = kGravity);

// ||g G psi - omega^2 psi||_inf / ||omega^2 psi||_inf
double mild_slope_residual(const CField& psi, double omega, const SeparableSymbol& dn, double gravity = kGravity);

}  // namespace wavecore
