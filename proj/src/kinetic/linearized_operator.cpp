#include "vpb/kinetic/linearized_operator.hpp"

#include "vpb/kinetic/collision.hpp"
#include "vpb/kinetic/lobpcg.hpp"
#include "vpb/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vpb::kinetic {

namespace {

// exp(-x) I0(x)
double scaled_i0(double x) {
  if (x < 600.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
  return (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / std::sqrt(2.0 * kPi * x);
}

// Transverse factor of the gain kernel,
//   g(r, q) = int_0^inf rho (r^2 + rho^2)^((gamma-1)/2) e^{-(q-rho)^2/2} I0~(q rho) d rho,
// tabulated on a uniform q grid for every lattice distance r = h sqrt(n2).
// For gamma = 1 it is identically 1. Also tabulates the radial moment
//   M(q, R) = int_0^R r g(r, q) dr
// used by the singular self-cell integral.
class TransverseTable {
 public:
  TransverseTable(double gamma, double h, int maxn2, double qmax, const std::vector<double>& cell_radii)
      : gamma_(gamma) {
    dq_ = 0.05;
    nq_ = static_cast<int>(std::ceil(qmax / dq_)) + 4;
    if (gamma == 1.0) return;
    std::vector<double> rho, wr;
    const double rho_max = qmax + 14.0;
    std::vector<double> gx, gw;
    gauss_legendre(16, 0.0, 1.0, gx, gw);
    for (double a = 0.0; a < rho_max - 1e-12;) {
      const double b = a + (a < 2.0 ? 0.125 : 0.5);
      for (int k = 0; k < 16; ++k) {
        rho.push_back(a + (b - a) * gx[k]);
        wr.push_back((b - a) * gw[k]);
      }
      a = b;
    }
    const auto nr = static_cast<Eigen::Index>(rho.size());
    Matrix A(nq_, nr);
    for (int iq = 0; iq < nq_; ++iq) {
      const double q = iq * dq_;
      for (Eigen::Index k = 0; k < nr; ++k) {
        const double p = rho[static_cast<std::size_t>(k)];
        A(iq, k) = wr[static_cast<std::size_t>(k)] * p * std::exp(-0.5 * (q - p) * (q - p)) * scaled_i0(q * p);
      }
    }
    Matrix Wt(nr, maxn2 + 1);
    for (int n2 = 0; n2 <= maxn2; ++n2) {
      const double r2 = h * h * n2;
      for (Eigen::Index k = 0; k < nr; ++k) {
        const double p = rho[static_cast<std::size_t>(k)];
        Wt(k, n2) = n2 == 0 ? 0.0 : std::pow(r2 + p * p, 0.5 * (gamma - 1.0));
      }
    }
    table_ = A * Wt;  // nq x (maxn2 + 1)
    Matrix Mt(nr, static_cast<Eigen::Index>(cell_radii.size()));
    for (std::size_t c = 0; c < cell_radii.size(); ++c) {
      const double R2 = cell_radii[c] * cell_radii[c];
      for (Eigen::Index k = 0; k < nr; ++k) {
        const double p2 = rho[static_cast<std::size_t>(k)] * rho[static_cast<std::size_t>(k)];
        // int_0^R r (r^2 + p^2)^((gamma-1)/2) dr in closed form
        Mt(k, static_cast<Eigen::Index>(c)) =
            std::abs(gamma + 1.0) < 1e-12 ? 0.5 * std::log1p(R2 / p2)
                                          : (std::pow(R2 + p2, 0.5 * (gamma + 1.0)) - std::pow(p2, 0.5 * (gamma + 1.0))) /
                                                (gamma + 1.0);
      }
    }
    moment_ = A * Mt;  // nq x n_cell_radii
  }

  double operator()(int n2, double q) const {
    if (gamma_ == 1.0) return 1.0;
    return interp(table_, n2, q);
  }
  // M(q, R_c) / (R_c^2 / 2): the r-average of g over [0, R_c] with weight r.
  double cell_factor(int c, double q, double Rc) const {
    if (gamma_ == 1.0) return 1.0;
    return interp(moment_, c, q) / (0.5 * Rc * Rc);
  }

 private:
  double interp(const Matrix& t, int col, double q) const {
    const double s = q / dq_;
    int i = static_cast<int>(s) - 1;
    i = std::clamp(i, 0, nq_ - 4);
    const double x = s - i;
    const double* c = t.data() + static_cast<Eigen::Index>(col) * nq_ + i;
    // Cubic Lagrange through nodes i..i+3.
    const double l0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    const double l1 = x * (x - 2) * (x - 3) / 2.0;
    const double l2 = -x * (x - 1) * (x - 3) / 2.0;
    const double l3 = x * (x - 1) * (x - 2) / 6.0;
    return l0 * c[0] + l1 * c[1] + l2 * c[2] + l3 * c[3];
  }

  double gamma_;
  double dq_ = 0.0;
  int nq_ = 0;
  Matrix table_, moment_;
};

// Directions for integrating over the cube [-h/2, h/2]^3 as six pyramids
// with apex at the centre: unit direction, solid-angle weight, radial extent.
struct CellRule {
  std::vector<Vec3> dir;
  std::vector<double> weight;
  std::vector<int> radius_index;
  std::vector<double> radii;
};

CellRule make_cell_rule(double h, int order = 8) {
  std::vector<double> x, w;
  gauss_legendre(order, -1.0, 1.0, x, w);
  CellRule rule;
  for (int a = 0; a < order; ++a)
    for (int b = 0; b < order; ++b) {
      const double e = std::sqrt(1.0 + x[a] * x[a] + x[b] * x[b]);
      const double R = 0.5 * h * e;
      auto it = std::find_if(rule.radii.begin(), rule.radii.end(), [&](double r) { return std::abs(r - R) < 1e-13; });
      int ri = static_cast<int>(it - rule.radii.begin());
      if (it == rule.radii.end()) rule.radii.push_back(R);
      for (int axis = 0; axis < 3; ++axis)
        for (int sgn : {1, -1}) {
          Vec3 d;
          d[axis] = sgn;
          d[(axis + 1) % 3] = x[a];
          d[(axis + 2) % 3] = x[b];
          rule.dir.push_back(d / e);
          rule.weight.push_back(w[a] * w[b] / (e * e * e));
          rule.radius_index.push_back(ri);
        }
    }
  return rule;
}

// Integral over the cell around v of K2(v, v + z) sqrt(mu(v + z)) / sqrt(mu(v)),
// singular like 1/|z|. The exponential factor is integrated exactly along each
// ray; for gamma != 1 the transverse factor enters through its r-average.
double self_cell_gain(const Vec3& v, double pref, const CellRule& rule, const TransverseTable& g,
                      const std::vector<double>& gx, const std::vector<double>& gw) {
  double s = 0.0;
  for (std::size_t d = 0; d < rule.dir.size(); ++d) {
    const Vec3& z = rule.dir[d];
    const double p = v.dot(z);
    const double q = std::sqrt(std::max(0.0, v.squaredNorm() - p * p));
    const int ri = rule.radius_index[d];
    const double R = rule.radii[static_cast<std::size_t>(ri)];
    double radial = 0.0;
    for (std::size_t k = 0; k < gx.size(); ++k) {
      const double r = R * gx[k];
      radial += R * gw[k] * r * std::exp(-0.5 * (p + r) * (p + r));
    }
    s += rule.weight[d] * radial * g.cell_factor(ri, q, R);
  }
  return pref * s;
}

double max_kernel_defect(const Matrix& L, const Matrix& basis, double nu_norm) {
  double d = 0.0;
  for (int r = 0; r < basis.cols(); ++r) d = std::max(d, (L * basis.col(r)).norm());
  return d / nu_norm;
}

// L <- (I - U U^T) L (I - U U^T) for Euclidean-orthonormal U.
void project_out(Matrix& L, const Matrix& U) {
  const Matrix LU = L * U;
  const Matrix UtLU = U.transpose() * LU;
  L.noalias() -= LU * U.transpose();
  L.noalias() -= U * LU.transpose();
  L.noalias() += U * (UtLU * U.transpose());
  L = 0.5 * (L + L.transpose());
}

}  // namespace

Matrix LinearizedOperator::K() const {
  Matrix k = -L;
  k.diagonal() += nu;
  return k;
}

LinearizedOperator assemble_linearized(const PotentialModel& model, const VelocityGrid& grid,
                                       const AngularQuadrature& angular, const AssemblyOptions& opts) {
  const int N = grid.per_axis_count;
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double h = grid.spacing;
  const double w = grid.quad_weights[0];
  const double C = model.angular_amplitude;
  const int maxn2 = 3 * (N - 1) * (N - 1);
  const double qmax = std::sqrt(3.0) * grid.truncation_radius + 1.0;
  const CellRule cell = make_cell_rule(h);
  const TransverseTable g(model.gamma, h, maxn2, qmax, cell.radii);

  std::vector<double> inv_r(static_cast<std::size_t>(maxn2) + 1, 0.0), speed(inv_r.size(), 0.0);
  for (int n2 = 1; n2 <= maxn2; ++n2) {
    const double r = h * std::sqrt(double(n2));
    inv_r[static_cast<std::size_t>(n2)] = 1.0 / r;
    speed[static_cast<std::size_t>(n2)] = std::pow(r, model.gamma);
  }
  const double c2 = 4.0 * C / std::sqrt(2.0 * kPi) * w;
  const double c1 = C * angular.abs_cos_moment() * w;

  LinearizedOperator op;
  op.nu = collision_frequency_nodes(model, grid, angular);
  op.L.resize(n, n);
  // Rows write disjoint entries (i, k > i) and (k, i), so rows run in parallel.
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    const Vec3& vi = grid.nodes[row];
    const int i0 = static_cast<int>(i) / (N * N), i1 = (static_cast<int>(i) / N) % N, i2 = static_cast<int>(i) % N;
    op.L(i, i) = 0.0;
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const Vec3& vk = grid.nodes[static_cast<std::size_t>(k)];
      const int k0 = static_cast<int>(k) / (N * N), k1 = (static_cast<int>(k) / N) % N, k2 = static_cast<int>(k) % N;
      const int n2 = (i0 - k0) * (i0 - k0) + (i1 - k1) * (i1 - k1) + (i2 - k2) * (i2 - k2);
      const double ir = inv_r[static_cast<std::size_t>(n2)];
      const Vec3 zh = (vk - vi) * ir;
      const Vec3 mid = 0.5 * (vi + vk);
      const double s = mid.dot(zh);
      const double q = std::sqrt(std::max(0.0, mid.squaredNorm() - s * s));
      const double r2 = double(n2) * h * h;
      const double k2s = g(n2, q) * ir * c2 * std::exp(-0.5 * s * s - 0.125 * r2);
      const double k1s = c1 * speed[static_cast<std::size_t>(n2)] * grid.sqrt_mu[i] * grid.sqrt_mu[k];
      op.L(i, k) = k1s - k2s;
      op.L(k, i) = k1s - k2s;
    }
  });
  // Diagonal: nu - (gain self-cell) + (loss-partner self-cell). Enforcing
  // L sqrt(mu) = 0 through the row sum instead would drop the kernel mass
  // beyond the truncation box and collapse the gap.
  std::vector<double> gx, gw;
  gauss_legendre(16, 0.0, 1.0, gx, gw);
  const double ball = 4.0 * kPi * std::pow(h * std::cbrt(3.0 / (4.0 * kPi)), 3.0 + model.gamma) / (3.0 + model.gamma);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& vi = grid.nodes[static_cast<std::size_t>(i)];
    const double k2self = self_cell_gain(vi, c2 / w, cell, g, gx, gw);
    const double k1self = C * angular.abs_cos_moment() * grid.mu[i] * ball;
    op.L(i, i) = op.nu[i] - k2self + k1self;
  }

  const MacroProjector proj(grid);
  op.invariant_basis = proj.orthonormal_basis();
  op.euclidean_basis = proj.euclidean_basis();
  const double nn = op.diag_nu_norm();
  op.symmetry_defect_raw = (op.L - op.L.transpose()).cwiseAbs().maxCoeff();
  op.kernel_defect_raw = max_kernel_defect(op.L, op.invariant_basis, nn);
  if (op.symmetry_defect_raw > op.tol_sym()) {
    std::ostringstream os;
    os << "linearized operator symmetry defect " << op.symmetry_defect_raw << " exceeds " << op.tol_sym();
    throw NumericError(os.str());
  }
  project_out(op.L, op.euclidean_basis);
  op.symmetry_defect = (op.L - op.L.transpose()).cwiseAbs().maxCoeff();
  op.kernel_defect = max_kernel_defect(op.L, op.invariant_basis, nn);
  if (opts.estimate_gap) op.sigma0_estimate = spectral_gap_estimate(op);
  return op;
}

LinearizedOperator make_bgk_operator(const VelocityGrid& grid, double nu0) {
  if (!(nu0 > 0.0)) throw PreconditionError("bgk nu0 must be positive");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const MacroProjector proj(grid);
  LinearizedOperator op;
  op.bgk_nu0 = nu0;
  op.nu = Vector::Constant(n, nu0);
  op.invariant_basis = proj.orthonormal_basis();
  op.euclidean_basis = proj.euclidean_basis();
  op.L = -nu0 * op.euclidean_basis * op.euclidean_basis.transpose();
  op.L.diagonal().array() += nu0;
  op.L = 0.5 * (op.L + op.L.transpose());
  op.kernel_defect = op.kernel_defect_raw = max_kernel_defect(op.L, op.invariant_basis, nu0);
  op.sigma0_estimate = 1.0;
  return op;
}

Vector invert_L_micro(const LinearizedOperator& op, const VelocityGrid& grid, const Vector& rhs) {
  const Matrix& U = op.euclidean_basis;
  const double rn = rhs.norm();
  const Vector coef = U.transpose() * rhs;
  // Macro content measured in the weighted norm, relative to the rhs.
  if (coef.norm() > tol::moment * std::max(rn, 1e-300) && rn > 0.0)
    throw PreconditionError("invert_L_micro: rhs has a macroscopic component");
  if (rn == 0.0) return Vector::Zero(rhs.size());
  Vector b = rhs - U * coef;
  if (op.surrogate()) return b / *op.bgk_nu0;
  (void)grid;

  // Preconditioned CG on the micro subspace, preconditioner Q diag(1/nu) Q.
  auto project = [&](Vector& x) { x -= U * (U.transpose() * x); };
  const Vector dinv = op.nu.cwiseInverse();
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  Vector z = dinv.cwiseProduct(r);
  project(z);
  Vector p = z;
  double rz = r.dot(z);
  const double bn = b.norm();
  for (int it = 0; it < 2000 && r.norm() > 1e-12 * bn; ++it) {
    Vector Ap = op.L * p;
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    z = dinv.cwiseProduct(r);
    project(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  project(x);
  const double res = (op.L * x - b).norm();
  if (!(res <= tol::solve * bn)) {
    std::ostringstream os;
    os << "invert_L_micro: residual " << res / bn << " above tolerance";
    throw NumericError(os.str());
  }
  return x;
}

double spectral_gap_estimate(const LinearizedOperator& op) {
  if (op.surrogate()) {
    // L = nu0 (I - P) with nu = nu0: the ratio is exactly 1 on micro profiles.
    return 1.0;
  }
  auto apply = [&](const Matrix& X, Matrix& Y) { Y.noalias() = op.L * X; };
  const LobpcgResult r = lobpcg(apply, op.nu, op.nu.cwiseInverse(), op.euclidean_basis, 1);
  const double s = r.values[0];
  if (!(s > 0.0)) {
    std::ostringstream os;
    os << "non-positive spectral gap estimate " << s;
    throw NumericError(os.str());
  }
  return s;
}

Vector smallest_micro_eigenvalues(const LinearizedOperator& op, int count) {
  if (op.surrogate()) return Vector::Constant(count, *op.bgk_nu0);
  auto apply = [&](const Matrix& X, Matrix& Y) { Y.noalias() = op.L * X; };
  const Vector ones = Vector::Ones(op.nu.size());
  return lobpcg(apply, ones, op.nu.cwiseInverse(), op.euclidean_basis, count).values;
}

KernelAudit audit_kernel(const LinearizedOperator& op) {
  KernelAudit a;
  a.threshold = 1e-8 * op.nu.maxCoeff();
  // The spectrum is {0 (x5, on the invariant span)} plus the micro spectrum.
  a.lambda6 = smallest_micro_eigenvalues(op, 1)[0];
  int zeros = 0;
  for (int r = 0; r < op.invariant_basis.cols(); ++r) {
    const double ray = op.invariant_basis.col(r).dot(op.L * op.invariant_basis.col(r)) /
                       op.invariant_basis.col(r).squaredNorm();
    if (std::abs(ray) < a.threshold) ++zeros;
  }
  a.kernel_dimension = zeros + (a.lambda6 < a.threshold ? 1 : 0);
  return a;
}

}  // namespace vpb::kinetic
