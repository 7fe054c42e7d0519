#include "vpb/kinetic/macro_projection.hpp"

#include <cmath>

namespace vpb::kinetic {

MacroProjector::MacroProjector(const VelocityGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  raw_.resize(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& v = grid.nodes[static_cast<std::size_t>(i)];
    const double s = grid.sqrt_mu[i];
    raw_(i, 0) = s;
    raw_(i, 1) = v.x() * s;
    raw_(i, 2) = v.y() * s;
    raw_(i, 3) = v.z() * s;
    raw_(i, 4) = 0.5 * (v.squaredNorm() - 3.0) * s;
  }
  weight_ = grid.quad_weights[0];
  const Matrix gram = weight_ * raw_.transpose() * raw_;
  gram_.compute(gram);
  // Modified Gram-Schmidt, two passes.
  ortho_ = raw_;
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < 5; ++r) {
      for (int s = 0; s < r; ++s) ortho_.col(r) -= weight_ * ortho_.col(s).dot(ortho_.col(r)) * ortho_.col(s);
      ortho_.col(r) /= std::sqrt(weight_ * ortho_.col(r).squaredNorm());
    }
  }
  euclid_ = std::sqrt(weight_) * ortho_;
}

FluidMoments MacroProjector::moments(const Vector& f) const {
  const Vector rhs = weight_ * raw_.transpose() * f;
  const Vector alpha = gram_.solve(rhs);
  FluidMoments m;
  m.a = alpha[0];
  m.b = Vec3(alpha[1], alpha[2], alpha[3]);
  m.c = alpha[4];
  return m;
}

Matrix MacroProjector::moments_block(const Matrix& f) const {
  const Matrix rhs = weight_ * raw_.transpose() * f;
  return gram_.solve(rhs);
}

Vector MacroProjector::reconstruct(const FluidMoments& m) const {
  Eigen::Matrix<double, 5, 1> alpha;
  alpha << m.a, m.b.x(), m.b.y(), m.b.z(), m.c;
  return raw_ * alpha;
}

Vector MacroProjector::apply(const Vector& f) const { return euclid_ * (euclid_.transpose() * f); }

Vector MacroProjector::micro(const Vector& f) const { return f - apply(f); }

void MacroProjector::micro_inplace(Matrix& f) const {
  const Matrix coeff = euclid_.transpose() * f;
  f.noalias() -= euclid_ * coeff;
}

std::pair<FluidMoments, Vector> project_P(const Vector& f, const VelocityGrid& grid) {
  MacroProjector p(grid);
  return {p.moments(f), p.apply(f)};
}

}  // namespace vpb::kinetic
