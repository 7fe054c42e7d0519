#include "vpb/kinetic/velocity_grid.hpp"

#include "vpb/kinetic/maxwellian.hpp"

#include <cmath>
#include <sstream>

namespace vpb::kinetic {

double VelocityGrid::dot(const Vector& f, const Vector& g) const {
  return quad_weights.cwiseProduct(f).dot(g);
}

double VelocityGrid::norm(const Vector& f) const { return std::sqrt(dot(f, f)); }

GridMoments grid_moments(int n, double R) {
  // The tensor rule factorizes: mass = m0^3, second moment = 3 m2 m0^2.
  const double h = 2.0 * R / n;
  double m0 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -R + (i + 0.5) * h;
    const double g = h * std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    m0 += g;
    m2 += g * x * x;
  }
  return {m0 * m0 * m0, 3.0 * m2 * m0 * m0};
}

VelocityGrid build_velocity_grid(int n, double R) {
  if (n < 4 || n % 2 != 0) throw PreconditionError("per_axis_count must be even and >= 4");
  if (!(R >= 6.0)) throw PreconditionError("truncation_radius must be >= 6");
  const GridMoments m = grid_moments(n, R);
  if (std::abs(m.mass - 1.0) > tol::moment || std::abs(m.second - 3.0) > tol::moment) {
    std::ostringstream os;
    os << "velocity grid under-resolved: mass " << m.mass << ", second moment " << m.second;
    throw PreconditionError(os.str());
  }
  VelocityGrid g;
  g.per_axis_count = n;
  g.truncation_radius = R;
  g.spacing = 2.0 * R / n;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  g.nodes.reserve(total);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) g.nodes.emplace_back(g.axis_value(i), g.axis_value(j), g.axis_value(k));
  const auto N = static_cast<Eigen::Index>(total);
  g.quad_weights = Vector::Constant(N, g.spacing * g.spacing * g.spacing);
  g.mu.resize(N);
  g.sqrt_mu.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    g.mu[i] = maxwellian(g.nodes[static_cast<std::size_t>(i)]);
    g.sqrt_mu[i] = std::sqrt(g.mu[i]);
  }
  return g;
}

}  // namespace vpb::kinetic
