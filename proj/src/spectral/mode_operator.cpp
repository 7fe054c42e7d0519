#include "vpb/spectral/mode_operator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace vpb::spectral {

ModeBasis ModeBasis::full(const kinetic::VelocityGrid& grid) {
  ModeBasis b;
  b.weight_ = grid.quad_weights[0];
  b.orbits_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) b.orbits_[i] = {static_cast<int>(i)};
  return b;
}

ModeBasis ModeBasis::axial(const kinetic::VelocityGrid& grid) {
  ModeBasis b;
  b.reduced_ = true;
  b.weight_ = grid.quad_weights[0];
  const int N = grid.per_axis_count;
  std::vector<int> owner(grid.size(), -1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const int idx = grid.index(i, j, k);
        if (owner[static_cast<std::size_t>(idx)] >= 0) continue;
        // Images of (j, k) under the symmetries of the square.
        const int jr = N - 1 - j, kr = N - 1 - k;
        const std::array<std::array<int, 2>, 8> img{{{j, k}, {jr, k}, {j, kr}, {jr, kr},
                                                     {k, j}, {kr, j}, {k, jr}, {kr, jr}}};
        std::vector<int> orbit;
        for (const auto& p : img) orbit.push_back(grid.index(i, p[0], p[1]));
        std::sort(orbit.begin(), orbit.end());
        orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
        const int r = static_cast<int>(b.orbits_.size());
        for (int m : orbit) owner[static_cast<std::size_t>(m)] = r;
        b.orbits_.push_back(std::move(orbit));
      }
  return b;
}

CVector ModeBasis::coordinates(const CVector& nodal) const {
  CVector c(size());
  for (Eigen::Index r = 0; r < size(); ++r) {
    const auto& o = orbits_[static_cast<std::size_t>(r)];
    cplx s = 0.0;
    for (int m : o) s += nodal[m];
    c[r] = s * std::sqrt(weight_ / double(o.size()));
  }
  return c;
}

Vector ModeBasis::coordinates(const Vector& nodal) const { return coordinates(CVector(nodal.cast<cplx>())).real(); }

CVector ModeBasis::nodal(const CVector& coords) const {
  Eigen::Index n = 0;
  for (const auto& o : orbits_) n += static_cast<Eigen::Index>(o.size());
  CVector f(n);
  for (Eigen::Index r = 0; r < size(); ++r) {
    const auto& o = orbits_[static_cast<std::size_t>(r)];
    const cplx v = coords[r] / std::sqrt(weight_ * double(o.size()));
    for (int m : o) f[m] = v;
  }
  return f;
}

Matrix ModeBasis::restrict_operator(const Matrix& A) const {
  const Eigen::Index m = size();
  if (!reduced_) return A;
  Matrix T(A.rows(), m);
  for (Eigen::Index s = 0; s < m; ++s) {
    Vector col = Vector::Zero(A.rows());
    for (int j : orbits_[static_cast<std::size_t>(s)]) col += A.col(j);
    T.col(s) = col;
  }
  Matrix R(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& o = orbits_[static_cast<std::size_t>(r)];
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m);
    for (int i : o) row += T.row(i);
    R.row(r) = row;
  }
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index s = 0; s < m; ++s)
      R(r, s) /= std::sqrt(double(orbits_[static_cast<std::size_t>(r)].size() * orbits_[static_cast<std::size_t>(s)].size()));
  return 0.5 * (R + R.transpose());
}

CVector ModeOperator::apply_transport(const CVector& c) const {
  const cplx a = density(c);
  const cplx mi(0.0, -1.0 / eps);
  CVector out = mi * (transport.cast<cplx>().cwiseProduct(c) + transport.cwiseProduct(s).cast<cplx>() * (a / k2()));
  return out;
}

CVector ModeOperator::apply_collision(const CVector& c) const { return -(L.cast<cplx>() * c) / (eps * eps); }

namespace {

void check_mode_args(const Vec3& k, double eps) {
  if (!(k.norm() > 0.0)) throw PreconditionError("mode operator: k = 0 is excluded (Poisson term undefined)");
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("mode operator: eps must lie in (0, 1]");
}

ModeOperator build(const Matrix& Lc, const ModeBasis& basis, const Vec3& k, double eps,
                   const kinetic::VelocityGrid& grid) {
  ModeOperator mop;
  mop.k = k;
  mop.eps = eps;
  mop.L = Lc;
  const Vector vk = grid.sample([&](const Vec3& v) { return v.dot(k); });
  mop.transport.resize(basis.size());
  for (Eigen::Index r = 0; r < basis.size(); ++r) mop.transport[r] = vk[basis.orbits()[static_cast<std::size_t>(r)].front()];
  mop.s = basis.coordinates(grid.sqrt_mu);
  const Eigen::Index m = basis.size();
  const cplx mi(0.0, -1.0 / eps);
  mop.matrix = (-Lc / (eps * eps)).cast<cplx>();
  const Vector ds = mop.transport.cwiseProduct(mop.s) / mop.k2();
  for (Eigen::Index r = 0; r < m; ++r) {
    mop.matrix(r, r) += mi * mop.transport[r];
    for (Eigen::Index c = 0; c < m; ++c) mop.matrix(r, c) += mi * ds[r] * mop.s[c];
  }
  return mop;
}

}  // namespace

ModeOperator assemble_mode_operator(const kinetic::LinearizedOperator& op, const Vec3& k, double eps,
                                    const kinetic::VelocityGrid& grid, const ModeBasis* basis) {
  check_mode_args(k, eps);
  if (op.size() != grid.size()) throw PreconditionError("mode operator: operator and grid sizes differ");
  if (basis == nullptr) {
    const ModeBasis full = ModeBasis::full(grid);
    return build(op.L, full, k, eps, grid);
  }
  if (basis->reduced() && (k.y() != 0.0 || k.z() != 0.0))
    throw PreconditionError("mode operator: the axial basis requires k along e1");
  return build(basis->restrict_operator(op.L), *basis, k, eps, grid);
}

ModeOperator assemble_mode_operator_reduced(const Matrix& L_coords, const ModeBasis& basis, const Vec3& k, double eps,
                                            const kinetic::VelocityGrid& grid) {
  check_mode_args(k, eps);
  if (L_coords.rows() != basis.size()) throw PreconditionError("mode operator: L does not match the basis");
  if (basis.reduced() && (k.y() != 0.0 || k.z() != 0.0))
    throw PreconditionError("mode operator: the axial basis requires k along e1");
  return build(L_coords, basis, k, eps, grid);
}

}  // namespace vpb::spectral
