#include "vpb/kinetic/angular_quadrature.hpp"

#include <cmath>
#include <numeric>

namespace vpb::kinetic {

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  Matrix J = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    x[i] = 0.5 * (b - a) * t + 0.5 * (b + a);
    w[i] = (b - a) * v0 * v0;  // 2 v0^2 scaled by (b - a) / 2
  }
}

double AngularQuadrature::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double AngularQuadrature::abs_cos_moment() const {
  double s = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) s += weights[m] * std::abs(directions[m].z());
  return s;
}

AngularQuadrature make_angular_quadrature(int n_polar, int n_azimuth) {
  if (n_polar < 1) throw PreconditionError("n_polar must be >= 1");
  if (n_azimuth < 2 || n_azimuth % 2 != 0) throw PreconditionError("n_azimuth must be even and >= 2");
  std::vector<double> x, w;
  gauss_legendre(n_polar, 0.0, 1.0, x, w);
  AngularQuadrature q;
  q.n_polar = n_polar;
  q.n_azimuth = n_azimuth;
  const double dphi = 2.0 * kPi / n_azimuth;
  // Upper hemisphere first, then the antipodes in the same order.
  for (int sign : {1, -1}) {
    for (int p = 0; p < n_polar; ++p) {
      const double c = x[p];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int a = 0; a < n_azimuth; ++a) {
        const double phi = (a + 0.5) * dphi;
        Vec3 d(s * std::cos(phi), s * std::sin(phi), c);
        q.directions.push_back(sign * d);
        q.weights.push_back(w[p] * dphi);
      }
    }
  }
  return q;
}

}  // namespace vpb::kinetic
