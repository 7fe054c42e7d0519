#include "vpb/solver/substeps.hpp"

#include "vpb/parallel.hpp"
#include "vpb/solver/fourier.hpp"

#include <cmath>
#include <functional>

namespace vpb::solver {

using kinetic::VelocityGrid;

void transport_step(KineticState& state, const SolverOperators& ops, double dt) {
  const SpatialGrid& sg = ops.sgrid;
  const VelocityGrid& vg = ops.vgrid;
  const Fourier ft(sg, static_cast<int>(vg.size()));
  CMatrix s = ft.forward(state.f);
  const double scale = dt / state.eps;
  parallel_for(static_cast<std::size_t>(s.cols()), [&](std::size_t m) {
    const Vec3 k = sg.wavenumber(m, true);
    if (k.squaredNorm() == 0.0) return;
    for (std::size_t i = 0; i < vg.size(); ++i) {
      const double th = -scale * vg.nodes[i].dot(k);
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) *= cplx(std::cos(th), std::sin(th));
    }
  });
  state.f = ft.backward(s);
}

void refresh_potential(KineticState& state, const SolverOperators& ops) {
  state.phi = poisson_solve(ops.sgrid, density(ops.vgrid, state.f));
}

void velocity_flux_divergence(const VelocityGrid& vgrid, const Vec3& E, const double* g, double* out) {
  const int n = vgrid.per_axis_count;
  const double inv2h = 0.5 / vgrid.spacing;
  // Interface flux (g_i + g_{i+1}) / 2, zero outside the box. The resulting
  // difference is centred inside and one-sided at the two end nodes.
  for (int axis = 0; axis < 3; ++axis) {
    const double e = E[axis];
    if (e == 0.0) continue;
    const int stride = axis == 0 ? n * n : (axis == 1 ? n : 1);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        int base;
        if (axis == 0) base = vgrid.index(0, p, q);
        else if (axis == 1) base = vgrid.index(p, 0, q);
        else base = vgrid.index(p, q, 0);
        const double* gl = g + base;
        double* ol = out + base;
        double left = 0.0;
        for (int i = 0; i < n; ++i) {
          const double right = i + 1 < n ? gl[i * stride] + gl[(i + 1) * stride] : 0.0;
          ol[i * stride] += e * (right - left) * inv2h;
          left = right;
        }
      }
    }
  }
}

namespace {

// d f / dt of the field terms on one profile with field gradient E.
void field_rhs(const VelocityGrid& vg, const Vec3& E, double eps, const double* f, double* g, double* out) {
  const auto n = static_cast<Eigen::Index>(vg.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    g[i] = vg.sqrt_mu[i] * f[i];
    out[i] = -vg.nodes[static_cast<std::size_t>(i)].dot(E) * vg.mu[i] / eps;
  }
  velocity_flux_divergence(vg, E, g, out);
  for (Eigen::Index i = 0; i < n; ++i) out[i] /= vg.sqrt_mu[i];
}

}  // namespace

void field_step(KineticState& state, const SolverOperators& ops, double dt, FieldOrder order) {
  const VelocityGrid& vg = ops.vgrid;
  const auto grad = gradient(ops.sgrid, state.phi);
  const auto nv = static_cast<Eigen::Index>(vg.size());
  parallel_for(static_cast<std::size_t>(state.f.cols()), [&](std::size_t cell) {
    const auto c = static_cast<Eigen::Index>(cell);
    const Vec3 E(grad[0][c], grad[1][c], grad[2][c]);
    if (E.squaredNorm() == 0.0) return;
    double* f = state.f.col(c).data();
    Vector g(nv), k1(nv);
    field_rhs(vg, E, state.eps, f, g.data(), k1.data());
    if (order == FieldOrder::euler) {
      for (Eigen::Index i = 0; i < nv; ++i) f[i] += dt * k1[i];
      return;
    }
    Vector f1(nv), k2(nv);
    for (Eigen::Index i = 0; i < nv; ++i) f1[i] = f[i] + dt * k1[i];
    field_rhs(vg, E, state.eps, f1.data(), g.data(), k2.data());
    for (Eigen::Index i = 0; i < nv; ++i) f[i] += 0.5 * dt * (k1[i] + k2[i]);
  });
}

Matrix nonlinear_term(const SolverOperators& ops, const Matrix& f) {
  if (ops.mode == CollisionMode::bgk) return kinetic::gamma_bgk_batch(*ops.proj, ops.vgrid, ops.nu0, f);
  return kinetic::gamma_bilinear_batch(ops.model, ops.vgrid, ops.angular, f, f);
}

namespace {

// phi(L) applied to every column for a scalar function phi of the eigenvalue.
Matrix apply_function(const SolverOperators& ops, const Matrix& F, const std::function<double(double)>& fn) {
  if (ops.mode == CollisionMode::bgk) {
    const Matrix& U = ops.proj->euclidean_basis();
    const Matrix macro = U * (U.transpose() * F);
    return fn(0.0) * macro + fn(ops.nu0) * (F - macro);
  }
  const Vector d = ops.eigvals.unaryExpr(fn);
  return ops.eigvecs * (d.asDiagonal() * (ops.eigvecs.transpose() * F));
}

double phi1(double z) { return std::abs(z) < 1e-8 ? 1.0 + 0.5 * z : std::expm1(z) / z; }

}  // namespace

void collision_step(KineticState& state, const SolverOperators& ops, double dt, CollisionScheme scheme,
                    bool gamma_on) {
  const double eps = state.eps;
  const double tau = dt / (eps * eps);
  if (scheme == CollisionScheme::implicit_euler) {
    Matrix rhs = state.f;
    if (gamma_on) rhs += (dt / eps) * nonlinear_term(ops, state.f);
    state.f = apply_function(ops, rhs, [tau](double l) { return 1.0 / (1.0 + tau * l); });
  } else {
    // Exponential midpoint: f_half from a half step of exponential Euler, then
    // the full step with the nonlinear term frozen at f_half.
    if (!gamma_on) {
      state.f = apply_function(ops, state.f, [tau](double l) { return std::exp(-tau * l); });
    } else {
      const Matrix n0 = nonlinear_term(ops, state.f) / eps;
      const Matrix half = apply_function(ops, state.f, [tau](double l) { return std::exp(-0.5 * tau * l); }) +
                          apply_function(ops, n0, [tau, dt](double l) { return 0.5 * dt * phi1(-0.5 * tau * l); });
      const Matrix n1 = nonlinear_term(ops, half) / eps;
      state.f = apply_function(ops, state.f, [tau](double l) { return std::exp(-tau * l); }) +
                apply_function(ops, n1, [tau, dt](double l) { return dt * phi1(-tau * l); });
    }
  }
  if (!state.f.allFinite()) throw NumericError("collision step produced non-finite values");
}

}  // namespace vpb::solver
