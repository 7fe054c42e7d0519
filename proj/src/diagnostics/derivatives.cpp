#include "vpb/diagnostics/derivatives.hpp"

#include "vpb/solver/fourier.hpp"

#include <map>
#include <memory>

namespace vpb::diagnostics {

using kinetic::VelocityGrid;
using solver::Fourier;
using solver::SpatialGrid;

std::string MultiIndex::label() const {
  std::string s = "a";
  for (int d : alpha) s += std::to_string(d);
  s += "b";
  for (int d : beta) s += std::to_string(d);
  return s;
}

namespace {

void all_of_order(int order, int dims, std::vector<Index3>& out) {
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) {
      const int k = order - i - j;
      if ((dims < 2 && j > 0) || (dims < 3 && k > 0)) continue;
      out.push_back({i, j, k});
    }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int total_max, int x_dim, int x_min, int x_max, int v_max) {
  std::vector<MultiIndex> out;
  for (int xo = x_min; xo <= std::min(x_max, total_max); ++xo) {
    std::vector<Index3> alphas;
    all_of_order(xo, x_dim, alphas);
    for (int vo = 0; vo <= std::min(v_max, total_max - xo); ++vo) {
      std::vector<Index3> betas;
      all_of_order(vo, 3, betas);
      for (const auto& a : alphas)
        for (const auto& b : betas) out.push_back({a, b});
    }
  }
  return out;
}

namespace {

CVector symbol(const SpatialGrid& grid, const Index3& alpha, Eigen::Index modes) {
  CVector s(modes);
  for (Eigen::Index m = 0; m < modes; ++m) {
    const Vec3 ko = grid.wavenumber(static_cast<std::size_t>(m), true);
    const Vec3 ke = grid.wavenumber(static_cast<std::size_t>(m), false);
    cplx v = 1.0;
    for (int d = 0; d < 3; ++d)
      for (int p = 0; p < alpha[d]; ++p) v *= cplx(0.0, alpha[d] % 2 ? ko[d] : ke[d]);
    s[m] = v;
  }
  return s;
}

}  // namespace

Matrix x_derivative(const SpatialGrid& grid, const Matrix& F, const Index3& alpha) {
  if (alpha[0] + alpha[1] + alpha[2] == 0) return F;
  const Fourier ft(grid, static_cast<int>(F.rows()));
  CMatrix s = ft.forward(F);
  s = s * symbol(grid, alpha, s.cols()).asDiagonal();
  return ft.backward(s);
}

Vector x_derivative(const SpatialGrid& grid, const Vector& field, const Index3& alpha) {
  return x_derivative(grid, Matrix(field.transpose()), alpha).row(0).transpose();
}

namespace {

// One axis, order 1 or 2, applied to every line of every column.
Matrix v_axis(const VelocityGrid& g, const Matrix& F, int axis, int order) {
  const int n = g.per_axis_count;
  const double h = g.spacing;
  const int stride = axis == 0 ? n * n : (axis == 1 ? n : 1);
  Matrix out(F.rows(), F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    const double* f = F.col(c).data();
    double* o = out.col(c).data();
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        const int base = axis == 0 ? g.index(0, p, q) : (axis == 1 ? g.index(p, 0, q) : g.index(p, q, 0));
        auto at = [&](int i) { return f[base + i * stride]; };
        for (int i = 0; i < n; ++i) {
          double d;
          if (order == 1) {
            if (i == 0) d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
            else if (i == n - 1) d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
            else d = (at(i + 1) - at(i - 1)) / (2.0 * h);
          } else {
            if (i == 0) d = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
            else if (i == n - 1) d = (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / (h * h);
            else d = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h);
          }
          o[base + i * stride] = d;
        }
      }
  }
  return out;
}

}  // namespace

Matrix v_derivative(const VelocityGrid& grid, const Matrix& F, const Index3& beta) {
  Matrix out = F;
  for (int axis = 0; axis < 3; ++axis) {
    int left = beta[axis];
    if (left < 0) throw PreconditionError("v_derivative: negative order");
    while (left > 0) {
      const int o = left >= 2 ? 2 : 1;
      out = v_axis(grid, out, axis, o);
      left -= o;
    }
  }
  return out;
}

std::vector<Matrix> derivatives(const SpatialGrid& sgrid, const VelocityGrid& vgrid, const Matrix& F,
                                const std::vector<MultiIndex>& list) {
  std::map<Index3, Matrix> xd;
  std::unique_ptr<Fourier> ft;
  CMatrix spec;
  for (const auto& mi : list) {
    if (xd.count(mi.alpha)) continue;
    if (mi.x_order() == 0) {
      xd.emplace(mi.alpha, F);
      continue;
    }
    if (!ft) {
      ft = std::make_unique<Fourier>(sgrid, static_cast<int>(F.rows()));
      spec = ft->forward(F);
    }
    xd.emplace(mi.alpha, ft->backward(spec * symbol(sgrid, mi.alpha, spec.cols()).asDiagonal()));
  }
  std::vector<Matrix> out;
  out.reserve(list.size());
  for (const auto& mi : list) out.push_back(v_derivative(vgrid, xd.at(mi.alpha), mi.beta));
  return out;
}

double weighted_sq_norm(const SpatialGrid& sgrid, const VelocityGrid& vgrid, const Matrix& F, const Vector& weight) {
  const Vector colsum = F.array().square().matrix().transpose() * weight;  // per cell
  return colsum.sum() * vgrid.quad_weights[0] * sgrid.cell_volume();
}

double sq_norm(const SpatialGrid& sgrid, const VelocityGrid& vgrid, const Matrix& F) {
  return F.squaredNorm() * vgrid.quad_weights[0] * sgrid.cell_volume();
}

double field_sq_norm(const SpatialGrid& sgrid, const Vector& field) {
  return field.squaredNorm() * sgrid.cell_volume();
}

}  // namespace vpb::diagnostics
