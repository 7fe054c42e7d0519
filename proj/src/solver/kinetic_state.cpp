#include "vpb/solver/kinetic_state.hpp"

#include "vpb/solver/fourier.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace vpb::solver {

using kinetic::VelocityGrid;

MacroFields macro_fields(const VelocityGrid& vgrid, const Matrix& f) {
  const auto n = static_cast<Eigen::Index>(vgrid.size());
  Matrix test(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& v = vgrid.nodes[static_cast<std::size_t>(i)];
    const double w = vgrid.quad_weights[i] * vgrid.sqrt_mu[i];
    test(i, 0) = w;
    test(i, 1) = w * v.x();
    test(i, 2) = w * v.y();
    test(i, 3) = w * v.z();
    test(i, 4) = w * (v.squaredNorm() / 3.0 - 1.0);
  }
  const Matrix m = test.transpose() * f;  // 5 x cells
  MacroFields out;
  out.a = m.row(0).transpose();
  for (int d = 0; d < 3; ++d) out.b[d] = m.row(d + 1).transpose();
  out.c = m.row(4).transpose();
  return out;
}

Vector density(const VelocityGrid& vgrid, const Matrix& f) {
  const Vector w = vgrid.quad_weights.cwiseProduct(vgrid.sqrt_mu);
  return f.transpose() * w;
}

SolverOperators make_solver_operators(const SpatialGrid& sgrid, const VelocityGrid& vgrid, CollisionMode mode,
                                      double nu0, const kinetic::PotentialModel& model,
                                      const kinetic::AngularQuadrature& angular,
                                      std::shared_ptr<const kinetic::LinearizedOperator> op) {
  SolverOperators ops{sgrid, vgrid, model, angular, mode, nullptr, nullptr, {}, {}, nu0};
  ops.proj = std::make_shared<kinetic::MacroProjector>(vgrid);
  if (mode == CollisionMode::bgk) {
    if (!(nu0 > 0.0)) throw PreconditionError("solver: bgk nu0 must be positive");
    ops.op = op ? op : std::make_shared<kinetic::LinearizedOperator>(kinetic::make_bgk_operator(vgrid, nu0));
    return ops;
  }
  if (!op) throw PreconditionError("solver: full collision mode needs an assembled operator");
  if (op->size() != vgrid.size()) throw PreconditionError("solver: operator and velocity grid disagree");
  ops.op = std::move(op);
  Eigen::SelfAdjointEigenSolver<Matrix> es(ops.op->L);
  if (es.info() != Eigen::Success) throw NumericError("solver: eigen-decomposition of L failed");
  ops.eigvecs = es.eigenvectors();
  // Null-space eigenvalues are rounding noise around 0; clamp so exp(-t lambda) <= 1.
  ops.eigvals = es.eigenvalues().cwiseMax(0.0);
  return ops;
}

namespace {

// theta and rho of a well-prepared mode with g = (3/2) theta - rho and
// Delta(rho + theta) = rho at wavenumber k.
std::pair<double, double> boussinesq_split(double k2) {
  const double theta = (1.0 + k2) / (1.5 + 2.5 * k2);
  return {1.5 * theta - 1.0, theta};
}

}  // namespace

KineticState make_initial_state(const SolverOperators& ops, double eps, const InitialData& init) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("solver: eps must lie in (0, 1]");
  const SpatialGrid& sg = ops.sgrid;
  const VelocityGrid& vg = ops.vgrid;
  const auto ncell = static_cast<Eigen::Index>(sg.cells());
  const auto nv = static_cast<Eigen::Index>(vg.size());
  const double k1 = 2.0 * kPi / sg.box_length;
  const double A = init.amplitude;

  // Macroscopic fields rho, u, theta per cell.
  Vector rho = Vector::Zero(ncell), theta = Vector::Zero(ncell);
  Matrix u = Matrix::Zero(3, ncell);
  if (init.preset == "zero") {
  } else if (init.preset == "macro_wave") {
    const auto [cr, ct] = boussinesq_split(k1 * k1);
    for (Eigen::Index c = 0; c < ncell; ++c) {
      const double x = sg.position(static_cast<std::size_t>(c)).x();
      rho[c] = A * cr * std::cos(k1 * x);
      theta[c] = A * ct * std::cos(k1 * x);
      u(1, c) = A * std::sin(k1 * x);
    }
  } else if (init.preset == "density_wave") {
    for (Eigen::Index c = 0; c < ncell; ++c)
      rho[c] = A * std::cos(k1 * sg.position(static_cast<std::size_t>(c)).x());
  } else if (init.preset == "random_macro") {
    // Random low modes (|m| <= 3 along x1) for every macroscopic field.
    std::mt19937_64 rng(init.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int field = 0; field < 5; ++field) {
      for (int m = 1; m <= 3; ++m) {
        const double ac = U(rng) / m, as = U(rng) / m;
        for (Eigen::Index c = 0; c < ncell; ++c) {
          const double x = sg.position(static_cast<std::size_t>(c)).x();
          const double val = 0.5 * A * (ac * std::cos(m * k1 * x) + as * std::sin(m * k1 * x));
          if (field == 0) rho[c] += val;
          else if (field == 4) theta[c] += val;
          else u(field - 1, c) += val;
        }
      }
    }
  } else {
    throw PreconditionError("solver: unknown initial-data preset '" + init.preset + "'");
  }

  KineticState s;
  s.eps = eps;
  s.f.resize(nv, ncell);
  for (Eigen::Index i = 0; i < nv; ++i) {
    const Vec3& v = vg.nodes[static_cast<std::size_t>(i)];
    const double sm = vg.sqrt_mu[i], e = 0.5 * (v.squaredNorm() - 3.0);
    for (Eigen::Index c = 0; c < ncell; ++c)
      s.f(i, c) = sm * (rho[c] + v.x() * u(0, c) + v.y() * u(1, c) + v.z() * u(2, c) + e * theta[c]);
  }
  // Discrete neutrality: remove the quadrature residue of the mean density.
  const Vector a = density(vg, s.f);
  const double abar = spatial_mean(a);
  if (abar != 0.0) {
    const double mass = vg.quad_weights.dot(vg.mu);
    s.f -= (abar / mass) * vg.sqrt_mu * Vector::Ones(ncell).transpose();
  }
  s.phi = poisson_solve(sg, density(vg, s.f));
  return s;
}

}  // namespace vpb::solver
