#pragma once

#include "vpb/solver/kinetic_state.hpp"

namespace vpb::solver {

// Exact spectral advection of every velocity node by dt / eps.
void transport_step(KineticState& state, const SolverOperators& ops, double dt);

// Re-solves -Delta phi = a for the current f.
void refresh_potential(KineticState& state, const SolverOperators& ops);

enum class FieldOrder { euler, rk2 };
// Field terms -(1/eps) v.grad phi sqrt(mu) + grad phi . grad_v(sqrt(mu) f) / sqrt(mu)
// with phi frozen. grad_v acts on sqrt(mu) f in conservative flux form with
// zero flux through the truncation boundary, so mass is exactly conserved.
void field_step(KineticState& state, const SolverOperators& ops, double dt, FieldOrder order = FieldOrder::rk2);

// grad_v . (E g) in flux form on one profile (g = sqrt(mu) f), added to out.
void velocity_flux_divergence(const kinetic::VelocityGrid& vgrid, const Vec3& E, const double* g, double* out);

enum class CollisionScheme {
  implicit_euler,  // (I + dt/eps^2 L) f_new = f + (dt/eps) Gamma(f, f)
  exponential,     // exponential midpoint rule, exact in the linear part
};
// gamma_on = false drops the nonlinear term.
void collision_step(KineticState& state, const SolverOperators& ops, double dt, CollisionScheme scheme,
                    bool gamma_on = true);

// Gamma(F_c, F_c) per column for the configured collision mode.
Matrix nonlinear_term(const SolverOperators& ops, const Matrix& f);

}  // namespace vpb::solver
