#include "vpb/solver/spatial_grid.hpp"

#include <cmath>

namespace vpb::solver {

SpatialGrid SpatialGrid::make(int per_axis_count, double box_length, int dim) {
  if (per_axis_count < 8 || (per_axis_count & (per_axis_count - 1)) != 0)
    throw PreconditionError("spatial grid: N_x must be a power of two >= 8");
  if (!(box_length > 0.0)) throw PreconditionError("spatial grid: box length must be positive");
  if (dim != 1 && dim != 3) throw PreconditionError("spatial grid: dim must be 1 or 3");
  return SpatialGrid{per_axis_count, box_length, dim};
}

std::size_t SpatialGrid::cells() const {
  const auto n = static_cast<std::size_t>(per_axis_count);
  return dim == 1 ? n : n * n * n;
}

double SpatialGrid::cell_volume() const { return std::pow(spacing(), dim); }

Vec3 SpatialGrid::position(std::size_t cell) const {
  const auto n = static_cast<std::size_t>(per_axis_count);
  const double h = spacing();
  if (dim == 1) return Vec3(double(cell) * h, 0.0, 0.0);
  return Vec3(double(cell / (n * n)) * h, double((cell / n) % n) * h, double(cell % n) * h);
}

std::size_t SpatialGrid::spectral_cells() const {
  const auto n = static_cast<std::size_t>(per_axis_count);
  return dim == 1 ? n / 2 + 1 : n * n * (n / 2 + 1);
}

namespace {

double signed_index(std::size_t j, std::size_t n, bool odd) {
  if (odd && 2 * j == n) return 0.0;
  return 2 * j <= n ? double(j) : double(j) - double(n);
}

}  // namespace

Vec3 SpatialGrid::wavenumber(std::size_t m, bool odd) const {
  const auto n = static_cast<std::size_t>(per_axis_count);
  const double k0 = 2.0 * kPi / box_length;
  if (dim == 1) return Vec3(k0 * signed_index(m, n, odd), 0.0, 0.0);
  const std::size_t nh = n / 2 + 1;
  const std::size_t j2 = m % nh, j1 = (m / nh) % n, j0 = m / (nh * n);
  return k0 * Vec3(signed_index(j0, n, odd), signed_index(j1, n, odd), signed_index(j2, n, odd));
}

double SpatialGrid::parseval_weight(std::size_t m) const {
  const auto n = static_cast<std::size_t>(per_axis_count);
  const std::size_t j = dim == 1 ? m : m % (n / 2 + 1);
  return (j == 0 || 2 * j == n) ? 1.0 : 2.0;
}

}  // namespace vpb::solver
