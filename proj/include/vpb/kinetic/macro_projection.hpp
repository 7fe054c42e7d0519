#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/velocity_grid.hpp"

#include <utility>

namespace vpb::kinetic {

// Fluid moments of a profile: density a, velocity b, temperature c.
struct FluidMoments {
  double a = 0.0;
  Vec3 b = Vec3::Zero();
  double c = 0.0;
};

// Discrete projection onto span{sqrt(mu), v sqrt(mu), (|v|^2-3)/2 sqrt(mu)}.
class MacroProjector {
 public:
  explicit MacroProjector(const VelocityGrid& grid);

  // Raw (non-orthogonal) basis, columns in the order a, b1, b2, b3, c.
  const Matrix& raw_basis() const { return raw_; }
  // Columns orthonormal under the weighted inner product.
  const Matrix& orthonormal_basis() const { return ortho_; }
  // Same span, orthonormal in the plain Euclidean sense (ortho * sqrt(w)).
  const Matrix& euclidean_basis() const { return euclid_; }

  FluidMoments moments(const Vector& f) const;
  Vector reconstruct(const FluidMoments& m) const;
  Vector apply(const Vector& f) const;  // Pf
  Vector micro(const Vector& f) const;  // (I - P) f
  // Moments for many profiles at once (columns), returned as 5 x ncols.
  Matrix moments_block(const Matrix& f) const;
  void micro_inplace(Matrix& f) const;

 private:
  Matrix raw_, ortho_, euclid_;
  Eigen::LDLT<Matrix> gram_;
  double weight_ = 0.0;
};

std::pair<FluidMoments, Vector> project_P(const Vector& f, const VelocityGrid& grid);

}  // namespace vpb::kinetic
