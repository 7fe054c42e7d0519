#pragma once

#include "vpb/kinetic/velocity_grid.hpp"
#include "vpb/solver/spatial_grid.hpp"

#include <array>
#include <string>
#include <vector>

namespace vpb::diagnostics {

using Index3 = std::array<int, 3>;

struct MultiIndex {
  Index3 alpha{};  // x-derivative orders
  Index3 beta{};   // v-derivative orders

  int x_order() const { return alpha[0] + alpha[1] + alpha[2]; }
  int v_order() const { return beta[0] + beta[1] + beta[2]; }
  int order() const { return x_order() + v_order(); }
  std::string label() const;
};

// Every (alpha, beta) with x_min <= |alpha| <= x_max, |beta| <= v_max and
// |alpha| + |beta| <= total_max, each multi-index once. Derivatives along
// unresolved x-axes vanish identically and are omitted.
std::vector<MultiIndex> multi_indices(int total_max, int x_dim, int x_min = 0, int x_max = 99, int v_max = 99);

// Spectral x-derivative of every row of F (rows = velocity nodes, columns = cells).
// Odd per-axis orders drop the Nyquist mode.
Matrix x_derivative(const solver::SpatialGrid& grid, const Matrix& F, const Index3& alpha);
Vector x_derivative(const solver::SpatialGrid& grid, const Vector& field, const Index3& alpha);

// Finite-difference v-derivative of every column: second-order centred
// stencils inside, second-order one-sided ones at the truncation boundary.
Matrix v_derivative(const kinetic::VelocityGrid& grid, const Matrix& F, const Index3& beta);

// All derivatives of F for the listed multi-indices (x-transforms shared).
std::vector<Matrix> derivatives(const solver::SpatialGrid& sgrid, const kinetic::VelocityGrid& vgrid,
                                const Matrix& F, const std::vector<MultiIndex>& list);

// sum_x sum_v weight_v F^2 dv dx.
double weighted_sq_norm(const solver::SpatialGrid& sgrid, const kinetic::VelocityGrid& vgrid, const Matrix& F,
                        const Vector& weight);
double sq_norm(const solver::SpatialGrid& sgrid, const kinetic::VelocityGrid& vgrid, const Matrix& F);
double field_sq_norm(const solver::SpatialGrid& sgrid, const Vector& field);

}  // namespace vpb::diagnostics
