#include "vpb/diagnostics/characteristics.hpp"

#include "vpb/solver/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace vpb::diagnostics {

using solver::SpatialGrid;

PotentialHistory::PotentialHistory(const SpatialGrid& grid, std::vector<double> times, const std::vector<Vector>& phis)
    : grid_(grid), times_(std::move(times)) {
  if (times_.empty() || times_.size() != phis.size())
    throw PreconditionError("potential history: need one field per sample time");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw PreconditionError("potential history: times must increase");
  const solver::Fourier ft(grid, 1);
  const double inv = 1.0 / double(grid.cells());
  for (const Vector& phi : phis) {
    if (static_cast<std::size_t>(phi.size()) != grid.cells()) throw PreconditionError("potential history: size mismatch");
    const CMatrix s = ft.forward(phi.transpose());
    Slice slice;
    for (Eigen::Index m = 0; m < s.cols(); ++m) {
      const Vec3 ke = grid.wavenumber(static_cast<std::size_t>(m), false);
      const Vec3 ko = grid.wavenumber(static_cast<std::size_t>(m), true);
      // The mean does not enter derivatives; Nyquist modes have no
      // unambiguous continuous extension and are dropped.
      if (ke.squaredNorm() == 0.0 || ke != ko || s(0, m) == cplx(0.0)) continue;
      slice.k.push_back(ke);
      slice.coefficient.push_back(grid.parseval_weight(static_cast<std::size_t>(m)) * inv * s(0, m));
    }
    slices_.push_back(std::move(slice));
  }
}

PotentialHistory PotentialHistory::frozen(const SpatialGrid& grid, const Vector& phi) {
  return PotentialHistory(grid, {0.0}, {phi});
}

void PotentialHistory::eval(const Slice& s, const Vec3& x, Vec3& g, Eigen::Matrix3d& H) const {
  g.setZero();
  H.setZero();
  for (std::size_t j = 0; j < s.k.size(); ++j) {
    const Vec3& k = s.k[j];
    const double th = k.dot(x);
    const cplx e = s.coefficient[j] * cplx(std::cos(th), std::sin(th));
    // Re(i k c e^{ikx}) = -k Im(c e^{ikx}); Re(-k k^T c e^{ikx}).
    g -= k * e.imag();
    H -= (k * k.transpose()) * e.real();
  }
}

void PotentialHistory::evaluate(double tau, const Vec3& x, Vec3& g, Eigen::Matrix3d& H) const {
  if (slices_.size() == 1 || tau <= times_.front()) return eval(slices_.front(), x, g, H);
  if (tau >= times_.back()) return eval(slices_.back(), x, g, H);
  const auto it = std::upper_bound(times_.begin(), times_.end(), tau);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin()), lo = hi - 1;
  const double w = (tau - times_[lo]) / (times_[hi] - times_[lo]);
  Vec3 g0, g1;
  Eigen::Matrix3d H0, H1;
  eval(slices_[lo], x, g0, H0);
  eval(slices_[hi], x, g1, H1);
  g = (1.0 - w) * g0 + w * g1;
  H = (1.0 - w) * H0 + w * H1;
}

Vec3 PotentialHistory::gradient(double tau, const Vec3& x) const {
  Vec3 g;
  Eigen::Matrix3d H;
  evaluate(tau, x, g, H);
  return g;
}

Eigen::Matrix3d PotentialHistory::hessian(double tau, const Vec3& x) const {
  Vec3 g;
  Eigen::Matrix3d H;
  evaluate(tau, x, g, H);
  return H;
}

double PotentialHistory::max_hessian() const {
  double m = 0.0;
  for (const auto& s : slices_) {
    for (std::size_t c = 0; c < grid_.cells(); ++c) {
      Vec3 g;
      Eigen::Matrix3d H;
      eval(s, grid_.position(c), g, H);
      m = std::max(m, H.cwiseAbs().maxCoeff());
    }
  }
  return m;
}

namespace {

struct Phase {
  Vec3 X, V;
  Eigen::Matrix3d JX, JV;  // dX/dv, dV/dv

  Phase operator+(const Phase& o) const { return {X + o.X, V + o.V, JX + o.JX, JV + o.JV}; }
  Phase operator*(double s) const { return {X * s, V * s, JX * s, JV * s}; }
};

}  // namespace

CharacteristicPath trace_characteristics(const PotentialHistory& phi, double eps, double t, const Vec3& x,
                                         const Vec3& v, int n_steps) {
  if (!(eps > 0.0)) throw PreconditionError("characteristics: eps must be positive");
  if (!(t >= 0.0)) throw PreconditionError("characteristics: t must be nonnegative");
  if (n_steps < 1) throw PreconditionError("characteristics: n_steps must be positive");
  auto rhs = [&](double tau, const Phase& y) {
    Vec3 g;
    Eigen::Matrix3d H;
    phi.evaluate(tau, y.X, g, H);
    Phase d;
    d.X = y.V / eps;
    d.JX = y.JV / eps;
    d.V = -g;
    d.JV = -H * y.JX;
    return d;
  };
  CharacteristicPath path;
  Phase y{x, v, Eigen::Matrix3d::Zero(), Eigen::Matrix3d::Identity()};
  const double h = -t / n_steps;
  auto record = [&](double tau) {
    path.taus.push_back(tau);
    const double box = phi.grid().box_length;
    Vec3 w;
    for (int d = 0; d < 3; ++d) w[d] = y.X[d] - box * std::floor(y.X[d] / box);
    path.X.push_back(w);
    path.V.push_back(y.V);
    path.jac_det.push_back(std::abs(y.JX.determinant()));
  };
  record(t);
  for (int s = 1; s <= n_steps; ++s) {
    const double tau = t + (s - 1) * h;
    const Phase k1 = rhs(tau, y);
    const Phase k2 = rhs(tau + 0.5 * h, y + k1 * (0.5 * h));
    const Phase k3 = rhs(tau + 0.5 * h, y + k2 * (0.5 * h));
    const Phase k4 = rhs(tau + h, y + k3 * h);
    y = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    if (!y.JX.allFinite() || !y.JV.allFinite() || y.JX.norm() > 1e12 || y.JV.norm() > 1e12)
      throw NumericError("characteristics: variational system lost conditioning", s);
    record(s == n_steps ? 0.0 : t + s * h);
  }
  return path;
}

double jacobian_bracket_margin(const CharacteristicPath& path, double eps) {
  const double t = path.taus.front();
  const double e3 = eps * eps * eps;
  double worst = 0.0;
  for (std::size_t i = 0; i < path.taus.size(); ++i) {
    const double d = std::abs(t - path.taus[i]);
    if (d == 0.0) continue;
    const double free = d * d * d / e3;
    const double det = path.jac_det[i];
    worst = std::max({worst, 0.5 * free / det, det / (2.0 * free)});
  }
  return worst;
}

}  // namespace vpb::diagnostics
