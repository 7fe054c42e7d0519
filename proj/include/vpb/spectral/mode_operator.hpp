#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/linearized_operator.hpp"
#include "vpb/kinetic/velocity_grid.hpp"

#include <vector>

namespace vpb::spectral {

// Orthonormal coordinates for velocity profiles. `full` uses one coordinate per
// node; `axial` keeps only profiles invariant under v2 -> -v2, v3 -> -v3 and
// v2 <-> v3 (enough for isotropic data evolved along k = |k| e1).
class ModeBasis {
 public:
  static ModeBasis full(const kinetic::VelocityGrid& grid);
  static ModeBasis axial(const kinetic::VelocityGrid& grid);

  bool reduced() const { return reduced_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(orbits_.size()); }
  const std::vector<std::vector<int>>& orbits() const { return orbits_; }

  // Nodal profile -> coordinates (orbit averages, scaled) and back.
  CVector coordinates(const CVector& nodal) const;
  CVector nodal(const CVector& coords) const;
  Vector coordinates(const Vector& nodal) const;
  // Basis representation of a symmetric nodal operator.
  Matrix restrict_operator(const Matrix& A) const;

 private:
  bool reduced_ = false;
  double weight_ = 0.0;
  std::vector<std::vector<int>> orbits_;
};

// Fourier-mode operator
//   B(k) f = -(i/eps)(v.k) f - (i/eps)(v.k)(a/|k|^2) sqrt(mu) - (1/eps^2) L f,
// a = <f, sqrt(mu)>, in the coordinates of a ModeBasis.
struct ModeOperator {
  Vec3 k = Vec3::Zero();
  double eps = 1.0;
  Vector transport;  // v.k per coordinate
  Vector s;          // coordinates of sqrt(mu)
  Matrix L;          // L in coordinates
  CMatrix matrix;

  double k2() const { return k.squaredNorm(); }
  cplx density(const CVector& c) const { return s.cast<cplx>().dot(c); }
  double energy(const CVector& c) const { return c.squaredNorm() + std::norm(density(c)) / k2(); }
  CVector apply(const CVector& c) const { return matrix * c; }
  // Transport + Poisson part and collision part separately.
  CVector apply_transport(const CVector& c) const;
  CVector apply_collision(const CVector& c) const;
};

// basis == nullptr means ModeBasis::full. For a reduced basis, k must be along e1.
ModeOperator assemble_mode_operator(const kinetic::LinearizedOperator& op, const Vec3& k, double eps,
                                    const kinetic::VelocityGrid& grid, const ModeBasis* basis = nullptr);

// Same but with L already restricted to the basis (avoids repeating the O(n^2) pass).
ModeOperator assemble_mode_operator_reduced(const Matrix& L_coords, const ModeBasis& basis, const Vec3& k,
                                            double eps, const kinetic::VelocityGrid& grid);

}  // namespace vpb::spectral
