#include "vpb/kinetic/collision.hpp"
#include "vpb/kinetic/macro_projection.hpp"

#include <array>
#include <cmath>

namespace vpb::kinetic {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Triquadratic Lagrange stencil around the nearest node (clamped, so points
// outside the box are extrapolated; exact for quadratics either way).
struct Stencil {
  std::array<int, 27> idx;
  std::array<double, 27> wt;
};

inline void axis_weights(double x, double R, double h, int N, int& base, double l[3]) {
  const double s = (x + R) / h - 0.5;
  int c = static_cast<int>(std::lround(s));
  c = std::clamp(c, 1, N - 2);
  const double t = s - c;
  base = c - 1;
  l[0] = 0.5 * t * (t - 1.0);
  l[1] = 1.0 - t * t;
  l[2] = 0.5 * t * (t + 1.0);
}

inline void make_stencil(const Vec3& p, const VelocityGrid& g, Stencil& st) {
  const int N = g.per_axis_count;
  int b0, b1, b2;
  double l0[3], l1[3], l2[3];
  axis_weights(p.x(), g.truncation_radius, g.spacing, N, b0, l0);
  axis_weights(p.y(), g.truncation_radius, g.spacing, N, b1, l1);
  axis_weights(p.z(), g.truncation_radius, g.spacing, N, b2, l2);
  int m = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double wab = l0[a] * l1[b];
      const int rowbase = ((b0 + a) * N + (b1 + b)) * N + b2;
      for (int c = 0; c < 3; ++c, ++m) {
        st.idx[m] = rowbase + c;
        st.wt[m] = wab * l2[c];
      }
    }
}

inline void interpolate(const Stencil& st, const RowMatrix& psi, double* __restrict out) {
  const auto P = psi.cols();
  const double* __restrict base = psi.data();
  for (Eigen::Index c = 0; c < P; ++c) out[c] = 0.0;
  for (int m = 0; m < 27; ++m) {
    const double* __restrict row = base + static_cast<Eigen::Index>(st.idx[m]) * P;
    const double w = st.wt[m];
    for (Eigen::Index c = 0; c < P; ++c) out[c] += w * row[c];
  }
}

void frame(const Vec3& n, Vec3& e1, Vec3& e2) {
  const Vec3 a = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (a - a.dot(n) * n).normalized();
  e2 = n.cross(e1);
}

}  // namespace

Matrix gamma_bilinear_batch(const PotentialModel& model, const VelocityGrid& grid,
                            const AngularQuadrature& angular, const Matrix& F, const Matrix& G,
                            const GammaOptions& opts) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto P = F.cols();
  if (F.rows() != n || G.rows() != n || G.cols() != P) throw PreconditionError("gamma: profile size mismatch");
  const bool same = (&F == &G) || (F.data() == G.data());

  RowMatrix psi_f(n, P), psi_g(n, P);
  for (Eigen::Index i = 0; i < n; ++i) {
    psi_f.row(i) = F.row(i) / grid.sqrt_mu[i];
    if (same)
      psi_g.row(i) = psi_f.row(i);
    else
      psi_g.row(i) = G.row(i) / grid.sqrt_mu[i];
  }

  // Upper-hemisphere half of the rule; v' is invariant under omega -> -omega.
  const std::size_t Mh = angular.directions.size() / 2;
  const double C = model.angular_amplitude;
  const double w = grid.quad_weights[0];
  const int N = grid.per_axis_count;
  const double h = grid.spacing;
  std::vector<double> speed(static_cast<std::size_t>(3 * (N - 1) * (N - 1)) + 1, 0.0);
  for (std::size_t n2 = 1; n2 < speed.size(); ++n2) speed[n2] = std::pow(h * std::sqrt(double(n2)), model.gamma);

  RowMatrix gain = RowMatrix::Zero(n, P);
  std::vector<double> fp(static_cast<std::size_t>(P)), fs(static_cast<std::size_t>(P)),
      gp(static_cast<std::size_t>(P)), gs(static_cast<std::size_t>(P)), acc_i(static_cast<std::size_t>(P)),
      acc_j(static_cast<std::size_t>(P));
  Stencil sp, ss;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& vi = grid.nodes[static_cast<std::size_t>(i)];
    const int i0 = static_cast<int>(i) / (N * N), i1 = (static_cast<int>(i) / N) % N, i2 = static_cast<int>(i) % N;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec3& vj = grid.nodes[static_cast<std::size_t>(j)];
      const int j0 = static_cast<int>(j) / (N * N), j1 = (static_cast<int>(j) / N) % N, j2 = static_cast<int>(j) % N;
      const int n2 = (i0 - j0) * (i0 - j0) + (i1 - j1) * (i1 - j1) + (i2 - j2) * (i2 - j2);
      const Vec3 u = vi - vj;
      const double r = u.norm();
      const Vec3 uh = u / r;
      Vec3 e1, e2;
      frame(uh, e1, e2);
      const double ci = w * grid.mu[j] * grid.sqrt_mu[i];
      const double cj = w * grid.mu[i] * grid.sqrt_mu[j];
      if (ci == 0.0 && cj == 0.0) continue;
      std::fill(acc_i.begin(), acc_i.end(), 0.0);
      std::fill(acc_j.begin(), acc_j.end(), 0.0);
      for (std::size_t m = 0; m < Mh; ++m) {
        const Vec3& d = angular.directions[m];
        const Vec3 om = d.x() * e1 + d.y() * e2 + d.z() * uh;
        const double uw = r * d.z();
        const double b = 2.0 * angular.weights[m] * C * speed[static_cast<std::size_t>(n2)] * d.z();
        const Vec3 vp = vi - uw * om;
        const Vec3 vs = vj + uw * om;
        make_stencil(vp, grid, sp);
        make_stencil(vs, grid, ss);
        interpolate(sp, psi_f, fp.data());
        interpolate(ss, psi_f, fs.data());
        if (same) {
          for (Eigen::Index c = 0; c < P; ++c) acc_i[c] += b * fp[c] * fs[c];
        } else {
          interpolate(sp, psi_g, gp.data());
          interpolate(ss, psi_g, gs.data());
          for (Eigen::Index c = 0; c < P; ++c) {
            acc_i[c] += b * fp[c] * gs[c];
            acc_j[c] += b * fs[c] * gp[c];
          }
        }
      }
      double* gi = gain.data() + i * P;
      double* gj = gain.data() + j * P;
      const std::vector<double>& aj = same ? acc_i : acc_j;
      for (Eigen::Index c = 0; c < P; ++c) {
        gi[c] += ci * acc_i[c];
        gj[c] += cj * aj[c];
      }
    }
  }

  // Loss: psi_f(v_i) * sum_j w mu_j (C * 2pi |u|^gamma) psi_g(v_j).
  const double ang = C * angular.abs_cos_moment();
  Matrix out(n, P);
  std::vector<double> loss(static_cast<std::size_t>(P));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int i0 = static_cast<int>(i) / (N * N), i1 = (static_cast<int>(i) / N) % N, i2 = static_cast<int>(i) % N;
    std::fill(loss.begin(), loss.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const int j0 = static_cast<int>(j) / (N * N), j1 = (static_cast<int>(j) / N) % N, j2 = static_cast<int>(j) % N;
      const int n2 = (i0 - j0) * (i0 - j0) + (i1 - j1) * (i1 - j1) + (i2 - j2) * (i2 - j2);
      const double k = w * grid.mu[j] * ang * speed[static_cast<std::size_t>(n2)];
      const double* pg = psi_g.data() + j * P;
      for (Eigen::Index c = 0; c < P; ++c) loss[c] += k * pg[c];
    }
    for (Eigen::Index c = 0; c < P; ++c) out(i, c) = gain(i, c) - grid.sqrt_mu[i] * psi_f(i, c) * loss[c];
  }
  if (opts.conservative) MacroProjector(grid).micro_inplace(out);
  return out;
}

Vector gamma_bilinear(const PotentialModel& model, const VelocityGrid& grid, const AngularQuadrature& angular,
                      const Vector& f, const Vector& g, const GammaOptions& opts) {
  if (&f == &g) {
    const Matrix F = f;
    return gamma_bilinear_batch(model, grid, angular, F, F, opts).col(0);
  }
  const Matrix F = f, G = g;
  return gamma_bilinear_batch(model, grid, angular, F, G, opts).col(0);
}

}  // namespace vpb::kinetic

namespace vpb::kinetic {

Vector gamma_bgk(const MacroProjector& proj, const VelocityGrid& grid, double nu0, const Vector& f,
                 const Vector& g) {
  Vector q = (proj.apply(f).array() * proj.apply(g).array() / grid.sqrt_mu.array()).matrix();
  return 0.5 * nu0 * proj.micro(q);
}

Matrix gamma_bgk_batch(const MacroProjector& proj, const VelocityGrid& grid, double nu0, const Matrix& F) {
  const Matrix mom = proj.moments_block(F);
  Matrix Q = proj.raw_basis() * mom;
  Q = (Q.array().square().colwise() / grid.sqrt_mu.array()).matrix();
  proj.micro_inplace(Q);
  return 0.5 * nu0 * Q;
}

}  // namespace vpb::kinetic
