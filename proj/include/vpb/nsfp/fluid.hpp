#pragma once

#include "vpb/nsfp/transport_coefficients.hpp"
#include "vpb/solver/spatial_grid.hpp"

#include <array>
#include <vector>

namespace vpb::nsfp {

using VectorField = std::array<Vector, 3>;

struct FluidState {
  Vector rho, theta, phi;
  VectorField u;
  double time = 0.0;

  Vector g() const { return 1.5 * theta - rho; }  // evolved variable (3/2) theta - rho
};

// u - grad Delta^{-1} div u; the zero mode is left alone.
VectorField leray_project(const solver::SpatialGrid& grid, const VectorField& u);
Vector divergence(const solver::SpatialGrid& grid, const VectorField& u);

struct Recovered {
  Vector rho, theta, phi;
};
// Solves Delta(rho + theta) = rho with g = (3/2) theta - rho mode by mode and
// phi = -(rho + theta). Rejects g with nonzero mean.
Recovered recover_rho_theta(const solver::SpatialGrid& grid, const Vector& g);
// max_x |Delta(rho + theta) - rho| / max(1, max|rho|).
double constraint_residual(const solver::SpatialGrid& grid, const Vector& rho, const Vector& theta);

// u = P u0; g0 = (3/2) theta0 - rho0 with (rho, theta, phi) re-derived from g0.
FluidState make_fluid_state(const solver::SpatialGrid& grid, const Vector& rho0, const VectorField& u0,
                            const Vector& theta0);

struct FluidConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  int record_every = 1;
  bool advection_on = true;
  bool forcing_on = true;  // rho grad theta
  void validate() const;
  long steps() const;
};

// One step of the integrating-factor Heun scheme: diffusion integrated exactly
// per mode, advection and forcing explicit, Leray projection on the u-update.
FluidState nsfp_step(const solver::SpatialGrid& grid, const FluidState& state, const TransportCoefficients& coeffs,
                     double dt, const FluidConfig& config = {});

struct FluidRun {
  std::vector<double> times;
  std::vector<FluidState> states;
  std::vector<double> kinetic_energy;  // (1/2) sum |u|^2 dx at each record
  double max_constraint_residual = 0.0;
  double max_divergence = 0.0;
};

// NumericError with the step index on NaN/Inf.
FluidRun nsfp_run(const solver::SpatialGrid& grid, const FluidState& initial, const TransportCoefficients& coeffs,
                  const FluidConfig& config);

}  // namespace vpb::nsfp
