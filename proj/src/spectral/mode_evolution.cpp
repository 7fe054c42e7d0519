#include "vpb/spectral/mode_evolution.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <sstream>

namespace vpb::spectral {

namespace {

void check_energy(const ModeOperator& mop, const CVector& c, double& e_prev, double e0, std::size_t step) {
  if (!c.allFinite()) throw NumericError("mode evolution produced a non-finite value", static_cast<long>(step));
  const double e = mop.energy(c);
  if (e > e_prev + tol::mono * e0) {
    std::ostringstream os;
    os << "mode energy increased from " << e_prev << " to " << e << " at step " << step;
    throw NumericError(os.str(), static_cast<long>(step));
  }
  e_prev = e;
}

// exp(tau A) for A = -(i/eps) D G, G = I + s s^T / |k|^2, via the Hermitian
// form G^{1/2} D G^{1/2}, and exp(tau C) for C = -L / eps^2.
class StrangFactors {
 public:
  explicit StrangFactors(const ModeOperator& mop) : mop_(mop) {
    const double k2 = mop.k2();
    const double s2 = mop.s.squaredNorm();
    alpha_ = s2 > 0.0 ? (std::sqrt(1.0 + s2 / k2) - 1.0) / s2 : 0.0;
    beta_ = s2 > 0.0 ? (1.0 / std::sqrt(1.0 + s2 / k2) - 1.0) / s2 : 0.0;
    const Eigen::Index m = mop.s.size();
    Matrix Gh = Matrix::Identity(m, m) + alpha_ * mop.s * mop.s.transpose();
    Matrix H = Gh * mop.transport.asDiagonal() * Gh;
    Eigen::SelfAdjointEigenSolver<Matrix> eh(0.5 * (H + H.transpose()));
    hv_ = eh.eigenvectors();
    hw_ = eh.eigenvalues();
    Eigen::SelfAdjointEigenSolver<Matrix> el(mop.L);
    lv_ = el.eigenvectors();
    lw_ = el.eigenvalues();
  }

  CVector transport(const CVector& c, double tau) const {
    CVector y = c + alpha_ * mop_.s.cast<cplx>() * mop_.density(c);
    CVector z = hv_.transpose().cast<cplx>() * y;
    for (Eigen::Index r = 0; r < z.size(); ++r) z[r] *= std::exp(cplx(0.0, -tau * hw_[r] / mop_.eps));
    y = hv_.cast<cplx>() * z;
    return y + beta_ * mop_.s.cast<cplx>() * mop_.density(y);
  }

  CVector collision(const CVector& c, double tau) const {
    CVector z = lv_.transpose().cast<cplx>() * c;
    for (Eigen::Index r = 0; r < z.size(); ++r) z[r] *= std::exp(-tau * std::max(0.0, lw_[r]) / (mop_.eps * mop_.eps));
    return lv_.cast<cplx>() * z;
  }

 private:
  const ModeOperator& mop_;
  double alpha_ = 0.0, beta_ = 0.0;
  Matrix hv_, lv_;
  Vector hw_, lw_;
};

}  // namespace

std::vector<CVector> evolve_mode(const ModeOperator& mop, const CVector& fhat0, const std::vector<double>& t_grid,
                                 const EvolveOptions& opts) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw PreconditionError("evolve_mode: t_grid must start at 0");
  for (std::size_t n = 1; n < t_grid.size(); ++n)
    if (!(t_grid[n] > t_grid[n - 1])) throw PreconditionError("evolve_mode: t_grid must be strictly increasing");
  if (fhat0.size() != mop.matrix.rows()) throw PreconditionError("evolve_mode: profile size mismatch");

  std::vector<CVector> out;
  out.reserve(t_grid.size());
  out.push_back(fhat0);
  const double e0 = mop.energy(fhat0);
  double e_prev = e0;
  if (e0 == 0.0) {
    for (std::size_t n = 1; n < t_grid.size(); ++n) out.push_back(CVector::Zero(fhat0.size()));
    return out;
  }

  if (opts.propagator == Propagator::expm) {
    std::map<double, CMatrix> cache;
    for (std::size_t n = 1; n < t_grid.size(); ++n) {
      const double dt = t_grid[n] - t_grid[n - 1];
      auto it = cache.find(dt);
      if (it == cache.end()) it = cache.emplace(dt, CMatrix((dt * mop.matrix).exp())).first;
      out.push_back(it->second * out.back());
      if (opts.check_monotone) check_energy(mop, out.back(), e_prev, e0, n);
    }
    return out;
  }

  const StrangFactors sf(mop);
  for (std::size_t n = 1; n < t_grid.size(); ++n) {
    const double dt = t_grid[n] - t_grid[n - 1];
    CVector c = sf.transport(out.back(), 0.5 * dt);
    c = sf.collision(c, dt);
    out.push_back(sf.transport(c, 0.5 * dt));
    if (opts.check_monotone) check_energy(mop, out.back(), e_prev, e0, n);
  }
  return out;
}

}  // namespace vpb::spectral
