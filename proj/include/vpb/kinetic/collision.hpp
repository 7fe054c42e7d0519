#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/angular_quadrature.hpp"
#include "vpb/kinetic/macro_projection.hpp"
#include "vpb/kinetic/potential_model.hpp"
#include "vpb/kinetic/velocity_grid.hpp"

namespace vpb::kinetic {

// nu(v) by grid quadrature in v* and the angular rule in the frame aligned with
// v - v*. For gamma < 0 a node coinciding with v is excluded and replaced by
// the integral over the equal-volume ball around it.
double collision_frequency(const PotentialModel& model, const VelocityGrid& grid,
                           const AngularQuadrature& angular, const Vec3& v);
Vector collision_frequency_nodes(const PotentialModel& model, const VelocityGrid& grid,
                                 const AngularQuadrature& angular);

struct GammaOptions {
  // Remove the residual {1, v, |v|^2} moments left by interpolation.
  bool conservative = true;
};

// Gamma(f, g) = mu^{-1/2} Q(sqrt(mu) f, sqrt(mu) g) in strong form: the
// post-collisional values of f / sqrt(mu) are interpolated (triquadratic).
Vector gamma_bilinear(const PotentialModel& model, const VelocityGrid& grid,
                      const AngularQuadrature& angular, const Vector& f, const Vector& g,
                      const GammaOptions& opts = {});

// Column-wise Gamma(F_c, G_c); G may alias F (then the symmetric fast path is used).
Matrix gamma_bilinear_batch(const PotentialModel& model, const VelocityGrid& grid,
                            const AngularQuadrature& angular, const Matrix& F, const Matrix& G,
                            const GammaOptions& opts = {});

// Quadratic part of the BGK operator nu0 (M[F] - F) around mu:
// (nu0 / 2) (I - P)((Pf)(Pg) / sqrt(mu)). The dropped terms of the local
// Maxwellian expansion are collision invariants, so this is exact at second order.
Vector gamma_bgk(const MacroProjector& proj, const VelocityGrid& grid, double nu0, const Vector& f,
                 const Vector& g);
// Columns F_c give Gamma_bgk(F_c, F_c).
Matrix gamma_bgk_batch(const MacroProjector& proj, const VelocityGrid& grid, double nu0, const Matrix& F);

}  // namespace vpb::kinetic
