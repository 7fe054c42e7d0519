#include "vpb/nsfp/fluid.hpp"

#include "vpb/solver/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace vpb::nsfp {

using solver::Fourier;
using solver::SpatialGrid;

namespace {

Matrix stack(const VectorField& u) {
  Matrix m(3, u[0].size());
  for (int d = 0; d < 3; ++d) m.row(d) = u[d].transpose();
  return m;
}

VectorField unstack(const Matrix& m) {
  return {m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()};
}

// Leray projection of a (3 x modes) spectrum in place.
void leray_spectral(const SpatialGrid& grid, CMatrix& s) {
  for (Eigen::Index m = 0; m < s.cols(); ++m) {
    const Vec3 k = grid.wavenumber(static_cast<std::size_t>(m), true);
    const double k2 = k.squaredNorm();
    if (k2 == 0.0) continue;
    const cplx kd = k[0] * s(0, m) + k[1] * s(1, m) + k[2] * s(2, m);
    for (int d = 0; d < 3; ++d) s(d, m) -= k[d] * kd / k2;
  }
}

// rho_hat and theta_hat of a mode with |k|^2 = k2.
std::pair<cplx, cplx> split_mode(double k2, cplx g) {
  const cplx theta = g * (1.0 + k2) / (1.5 + 2.5 * k2);
  return {1.5 * theta - g, theta};
}

double heat_rate(double k2, double kappa) { return 2.5 * kappa * k2 * (1.0 + k2) / (1.5 + 2.5 * k2); }

}  // namespace

VectorField leray_project(const SpatialGrid& grid, const VectorField& u) {
  const Fourier ft(grid, 3);
  CMatrix s = ft.forward(stack(u));
  leray_spectral(grid, s);
  return unstack(ft.backward(s));
}

Vector divergence(const SpatialGrid& grid, const VectorField& u) {
  Vector out = solver::spectral_derivative(grid, u[0], 0);
  if (grid.dim == 3) out += solver::spectral_derivative(grid, u[1], 1) + solver::spectral_derivative(grid, u[2], 2);
  return out;
}

Recovered recover_rho_theta(const SpatialGrid& grid, const Vector& g) {
  if (static_cast<std::size_t>(g.size()) != grid.cells()) throw PreconditionError("recover_rho_theta: size mismatch");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (std::abs(solver::spatial_mean(g)) > tol::cons * scale)
    throw PreconditionError("recover_rho_theta: g has nonzero mean");
  const Fourier ft(grid, 1);
  const CMatrix gs = ft.forward(g.transpose());
  CMatrix out(3, gs.cols());
  for (Eigen::Index m = 0; m < gs.cols(); ++m) {
    const double k2 = grid.wavenumber(static_cast<std::size_t>(m), false).squaredNorm();
    if (k2 == 0.0) {
      out.col(m).setZero();
      continue;
    }
    const auto [r, t] = split_mode(k2, gs(0, m));
    out(0, m) = r;
    out(1, m) = t;
    out(2, m) = -(r + t);
  }
  const Matrix phys = Fourier(grid, 3).backward(out);
  return {phys.row(0).transpose(), phys.row(1).transpose(), phys.row(2).transpose()};
}

double constraint_residual(const SpatialGrid& grid, const Vector& rho, const Vector& theta) {
  Matrix m(2, rho.size());
  m.row(0) = rho.transpose();
  m.row(1) = theta.transpose();
  const CMatrix s = Fourier(grid, 2).forward(m);
  double worst = 0.0, size = 0.0;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    const double k2 = grid.wavenumber(static_cast<std::size_t>(j), false).squaredNorm();
    if (k2 == 0.0) continue;
    worst = std::max(worst, std::abs(-k2 * (s(0, j) + s(1, j)) - s(0, j)));
    size = std::max(size, std::abs(s(0, j)) + std::abs(s(1, j)));
  }
  return size > 0.0 ? worst / size : worst;
}

FluidState make_fluid_state(const SpatialGrid& grid, const Vector& rho0, const VectorField& u0,
                            const Vector& theta0) {
  FluidState s;
  s.u = leray_project(grid, u0);
  const Recovered r = recover_rho_theta(grid, 1.5 * theta0 - rho0);
  s.rho = r.rho;
  s.theta = r.theta;
  s.phi = r.phi;
  return s;
}

void FluidConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("nsfp: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("nsfp: t_end must be nonnegative");
  if (record_every < 1) throw PreconditionError("nsfp: record_every must be >= 1");
}

long FluidConfig::steps() const { return static_cast<long>(std::ceil(t_end / dt - 1e-9)); }

namespace {

// Explicit part in spectral form, rows u1, u2, u3, g.
CMatrix explicit_terms(const SpatialGrid& grid, const Fourier& ft4, const CMatrix& y, const FluidConfig& cfg) {
  CMatrix out = CMatrix::Zero(4, y.cols());
  if (!cfg.advection_on && !cfg.forcing_on) return out;
  const Matrix phys = ft4.backward(y);
  const auto n = phys.cols();
  // Gradients of u1, u2, u3, g along each resolved axis.
  std::array<Matrix, 3> grad;
  for (int axis = 0; axis < 3; ++axis) {
    CMatrix d = y;
    for (Eigen::Index m = 0; m < y.cols(); ++m)
      d.col(m) *= cplx(0.0, grid.wavenumber(static_cast<std::size_t>(m), true)[axis]);
    grad[axis] = ft4.backward(d);
  }
  Matrix rhs = Matrix::Zero(4, n);
  if (cfg.advection_on) {
    for (int axis = 0; axis < 3; ++axis)
      rhs.array() -= grad[axis].array().rowwise() * phys.row(axis).array();
  }
  if (cfg.forcing_on) {
    const Recovered r = recover_rho_theta(grid, phys.row(3).transpose());
    for (int axis = 0; axis < 3; ++axis) {
      const Vector dtheta = solver::spectral_derivative(grid, r.theta, axis);
      rhs.row(axis) += r.rho.cwiseProduct(dtheta).transpose();
    }
  }
  out = ft4.forward(rhs);
  CMatrix uvel = out.topRows(3);
  leray_spectral(grid, uvel);
  out.topRows(3) = uvel;
  // Advection of g by a divergence-free u keeps the mean of g; drop the
  // rounding-level drift so the recovery precondition stays satisfied.
  out(3, 0) = 0.0;
  return out;
}

}  // namespace

FluidState nsfp_step(const SpatialGrid& grid, const FluidState& state, const TransportCoefficients& coeffs,
                     double dt, const FluidConfig& config) {
  coeffs.validate();
  const Fourier ft4(grid, 4);
  Matrix phys(4, state.rho.size());
  for (int d = 0; d < 3; ++d) phys.row(d) = state.u[d].transpose();
  phys.row(3) = state.g().transpose();
  const CMatrix y = ft4.forward(phys);
  CMatrix decay(4, y.cols());
  for (Eigen::Index m = 0; m < y.cols(); ++m) {
    const double k2 = grid.wavenumber(static_cast<std::size_t>(m), false).squaredNorm();
    decay.col(m).head<3>().setConstant(std::exp(-coeffs.lambda * k2 * dt));
    decay(3, m) = std::exp(-heat_rate(k2, coeffs.kappa) * dt);
  }
  const CMatrix n0 = explicit_terms(grid, ft4, y, config);
  const CMatrix y1 = decay.cwiseProduct(y + dt * n0);
  const CMatrix n1 = explicit_terms(grid, ft4, y1, config);
  CMatrix ynew = decay.cwiseProduct(y) + 0.5 * dt * (decay.cwiseProduct(n0) + n1);
  CMatrix uvel = ynew.topRows(3);
  leray_spectral(grid, uvel);
  ynew.topRows(3) = uvel;
  const Matrix out = ft4.backward(ynew);

  FluidState next;
  next.u = unstack(out.topRows(3));
  const Recovered r = recover_rho_theta(grid, out.row(3).transpose());
  next.rho = r.rho;
  next.theta = r.theta;
  next.phi = r.phi;
  next.time = state.time + dt;
  return next;
}

FluidRun nsfp_run(const SpatialGrid& grid, const FluidState& initial, const TransportCoefficients& coeffs,
                  const FluidConfig& config) {
  config.validate();
  FluidRun run;
  const double dV = grid.cell_volume();
  auto record = [&](const FluidState& s) {
    run.times.push_back(s.time);
    run.states.push_back(s);
    double e = 0.0;
    for (const auto& c : s.u) e += c.squaredNorm();
    run.kinetic_energy.push_back(0.5 * e * dV);
  };
  auto audit = [&](const FluidState& s) {
    run.max_constraint_residual = std::max(run.max_constraint_residual, constraint_residual(grid, s.rho, s.theta));
    const Vector div = divergence(grid, s.u);
    run.max_divergence = std::max(run.max_divergence, div.size() ? div.cwiseAbs().maxCoeff() : 0.0);
  };
  FluidState s = initial;
  audit(s);
  record(s);
  const long n = config.steps();
  const double dt = n > 0 ? config.t_end / double(n) : config.dt;
  for (long k = 1; k <= n; ++k) {
    s = nsfp_step(grid, s, coeffs, dt, config);
    bool finite = s.rho.allFinite() && s.theta.allFinite();
    for (const auto& c : s.u) finite = finite && c.allFinite();
    if (!finite) throw NumericError("nsfp: non-finite state", k);
    audit(s);
    if (k % config.record_every == 0 || k == n) record(s);
  }
  return run;
}

}  // namespace vpb::nsfp
