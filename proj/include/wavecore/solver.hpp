#pragma once
// Linear surface evolution on a static current over variable depth:
// right-hand side, RK4 stepping, sponge absorption and packet initial data.

#include <cstdint>
#include <optional>
#include <vector>

#include "wavecore/dn_operator.hpp"
#include "wavecore/field_io.hpp"
#include "wavecore/grid.hpp"
#include "wavecore/physics.hpp"

namespace wavecore {

struct WaveState {
  RField eta;
  RField phi;
  double t = 0.0;
};

// Depth-varying background flow of the form
//   U(x,z) = U0 + A T(x) cos(pi z / b0),  W(x,z) = -A (b0/pi) T'(x) sin(pi z / b0),
// which is divergence free for any horizontal profile T. The profile and its
// first two derivatives are sampled at grid nodes from their closed forms.
struct BulkCurrent {
  double U0 = 0.0;
  double amplitude = 0.0;
  double depth = 1.0;
  RField profile, profile_dx, profile_dxx;

  double u(std::size_t i, double z) const;
  double w(std::size_t i, double z) const;
  double du_dx(std::size_t i, double z) const;
  double du_dz(std::size_t i, double z) const;
  double dw_dx(std::size_t i, double z) const;
  double dw_dz(std::size_t i, double z) const;
  RField surface_trace() const;
};

struct SpongeProfile {
  double width = 0.1;  // fraction of each axis length, per side
  double s0 = 0.0;     // peak damping rate (1/s); zero disables the layer
};

// Damping rate field: s0 * ramp, with ramp = 1 - prod_axes(1 - smoothstep(depth into layer)).
RField sponge_rate(const Grid& g, const SpongeProfile& sp);

struct Environment {
  Grid grid;
  RField b;
  RField Ux, Uy;  // Uy is all zeros in 1D
  std::optional<BulkCurrent> bulk;
  SpongeProfile sponge;
  RField damping;  // sponge_rate(grid, sponge), empty when disabled
  double g = kGravity;

  bool has_flow = false;  // any nonzero surface current

  double bmin() const;
  double bmax() const;
  double max_speed() const;
};

// Validates shapes, positivity of depth and the bulk/surface trace match.
// Throws ConfigError.
Environment make_environment(const Grid& grid, RField b, RField Ux, RField Uy = {}, const SpongeProfile& sponge = {},
                             std::optional<BulkCurrent> bulk = std::nullopt, double g = kGravity);

// Largest |f_hat| over the top third of the spectrum relative to max |f_hat|.
double spectral_tail(const Grid& g, const RField& f);

struct StateRate {
  RField deta, dphi;
};

StateRate rhs(const WaveState& s, const Environment& env, const SeparableSymbol& dn);

double cfl_dt(const Environment& env, double safety = 0.8);

// min(cfl_dt, carrier period / steps_per_period)
double resolved_dt(const Environment& env, double omega_carrier, int steps_per_period, double safety = 0.8);

// One classical RK4 step; throws NumericalAbort if the result is not finite.
WaveState step_rk4(const WaveState& s, const Environment& env, const SeparableSymbol& dn, double dt);

// eta = a exp(-|x-xc|^2 / (2 sw^2)) cos(k0 (x - xc)), phi = 0, with periodic
// distances. The 2D form multiplies Gaussians per axis; the carrier is along x.
// Throws ConfigError if sw < 4 dx or k0 >= Nyquist / 2.
WaveState packet_ic(const Grid& g, double xc, double sw, double k0, double a);
WaveState packet_ic(const Grid& g, double xc, double yc, double swx, double swy, double k0, double a);

// Flat-depth potential that makes eta a purely right-going (direction +1) or
// left-going (-1) wave along x.
RField directional_potential(const Grid& g, const RField& eta, double b0, int direction, double gravity = kGravity);

struct BulkVelocity {
  std::vector<double> z;
  std::vector<RField> u, v, w;  // v empty in 1D
};

// Velocity of the harmonic extension of phi into a flat layer of depth b0.
BulkVelocity harmonic_extension(const Grid& g, const RField& phi, double b0, const std::vector<double>& z);
// Same, but rejects a non-constant depth field.
BulkVelocity harmonic_extension(const Grid& g, const RField& phi, const RField& b, const std::vector<double>& z);

Checkpoint make_checkpoint(const WaveState& s, double dt, std::uint64_t scenario_hash);

}  // namespace wavecore
