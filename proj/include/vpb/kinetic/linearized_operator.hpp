#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/angular_quadrature.hpp"
#include "vpb/kinetic/macro_projection.hpp"
#include "vpb/kinetic/potential_model.hpp"
#include "vpb/kinetic/velocity_grid.hpp"

#include <optional>

namespace vpb::kinetic {

struct LinearizedOperator {
  Vector nu;
  Matrix L;                 // diag(nu) - K, symmetric, annihilates invariant_basis
  Matrix invariant_basis;   // n x 5, orthonormal under the weighted product
  Matrix euclidean_basis;   // same span, Euclidean orthonormal
  double sigma0_estimate = 0.0;
  double symmetry_defect_raw = 0.0;  // max |L_ij - L_ji| before symmetrization
  double symmetry_defect = 0.0;      // after
  double kernel_defect_raw = 0.0;    // max_b ||L b|| / ||diag nu|| before the null-space correction
  double kernel_defect = 0.0;        // same, final
  std::optional<double> bgk_nu0;     // set for the BGK surrogate

  std::size_t size() const { return static_cast<std::size_t>(nu.size()); }
  bool surrogate() const { return bgk_nu0.has_value(); }
  double diag_nu_norm() const { return nu.cwiseAbs().maxCoeff(); }
  double tol_sym() const { return tol::sym_rel * diag_nu_norm(); }
  Matrix K() const;
  Vector apply(const Vector& f) const { return L * f; }
};

struct AssemblyOptions {
  bool estimate_gap = true;
};

// Dense L = nu - K2 + K1. The gain kernel K2 is evaluated in Carleman form
// (a smooth 1D radial integral, tabulated); the diagonal carries the
// self-cell integrals and the residual null-space defect is projected out.
LinearizedOperator assemble_linearized(const PotentialModel& model, const VelocityGrid& grid,
                                       const AngularQuadrature& angular,
                                       const AssemblyOptions& opts = {});

// BGK surrogate L = nu0 (I - P).
LinearizedOperator make_bgk_operator(const VelocityGrid& grid, double nu0);

// g with L g = rhs and g orthogonal to the invariants (preconditioned CG).
Vector invert_L_micro(const LinearizedOperator& op, const VelocityGrid& grid, const Vector& rhs);

// min <Lf,f> / ||f||_nu^2 over micro profiles.
double spectral_gap_estimate(const LinearizedOperator& op);

// Smallest eigenvalues of L on the micro subspace (plain weighted norm).
Vector smallest_micro_eigenvalues(const LinearizedOperator& op, int count);

struct KernelAudit {
  int kernel_dimension = 0;  // eigenvalues below 1e-8 max nu
  double lambda6 = 0.0;      // smallest micro eigenvalue
  double threshold = 0.0;
};
KernelAudit audit_kernel(const LinearizedOperator& op);

}  // namespace vpb::kinetic
