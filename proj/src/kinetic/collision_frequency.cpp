#include "vpb/kinetic/collision.hpp"
#include "vpb/kinetic/maxwellian.hpp"

#include <cmath>

namespace vpb::kinetic {

namespace {

// Integral of |z|^gamma over the ball with the volume of one cell.
double self_cell_integral(double gamma, double h) {
  const double rc = h * std::cbrt(3.0 / (4.0 * kPi));
  return 4.0 * kPi * std::pow(rc, 3.0 + gamma) / (3.0 + gamma);
}

}  // namespace

double collision_frequency(const PotentialModel& model, const VelocityGrid& grid,
                           const AngularQuadrature& angular, const Vec3& v) {
  const double h = grid.spacing;
  const double w = grid.quad_weights[0];
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = (v - grid.nodes[j]).norm();
    if (r < 1e-12 * h) {
      sum += maxwellian(v) * self_cell_integral(model.gamma, h);
      continue;
    }
    sum += w * std::pow(r, model.gamma) * grid.mu[static_cast<Eigen::Index>(j)];
  }
  return model.angular_amplitude * angular.abs_cos_moment() * sum;
}

Vector collision_frequency_nodes(const PotentialModel& model, const VelocityGrid& grid,
                                 const AngularQuadrature& angular) {
  const int N = grid.per_axis_count;
  const double h = grid.spacing;
  const double w = grid.quad_weights[0];
  // |v_i - v_j|^gamma depends only on the integer offset.
  const int maxn2 = 3 * (N - 1) * (N - 1);
  std::vector<double> table(static_cast<std::size_t>(maxn2) + 1);
  table[0] = self_cell_integral(model.gamma, h) / w;
  for (int n2 = 1; n2 <= maxn2; ++n2) table[static_cast<std::size_t>(n2)] = std::pow(h * std::sqrt(double(n2)), model.gamma);
  const double pref = model.angular_amplitude * angular.abs_cos_moment() * w;
  Vector nu(static_cast<Eigen::Index>(grid.size()));
  for (int i0 = 0; i0 < N; ++i0)
    for (int i1 = 0; i1 < N; ++i1)
      for (int i2 = 0; i2 < N; ++i2) {
        double s = 0.0;
        for (int j0 = 0; j0 < N; ++j0) {
          const int d0 = (i0 - j0) * (i0 - j0);
          for (int j1 = 0; j1 < N; ++j1) {
            const int d01 = d0 + (i1 - j1) * (i1 - j1);
            const double* mu_row = grid.mu.data() + grid.index(j0, j1, 0);
            for (int j2 = 0; j2 < N; ++j2) s += table[static_cast<std::size_t>(d01 + (i2 - j2) * (i2 - j2))] * mu_row[j2];
          }
        }
        nu[grid.index(i0, i1, i2)] = pref * s;
      }
  return nu;
}

}  // namespace vpb::kinetic
