#pragma once

#include "vpb/common.hpp"

#include <cstddef>

namespace vpb::solver {

// Periodic box [0, L)^dim with N points per resolved axis. In 1D only x1 is
// resolved; the other directions are constant.
struct SpatialGrid {
  int per_axis_count = 0;
  double box_length = 0.0;
  int dim = 1;

  static SpatialGrid make(int per_axis_count, double box_length, int dim);

  std::size_t cells() const;
  double spacing() const { return box_length / per_axis_count; }
  double cell_volume() const;
  Vec3 position(std::size_t cell) const;

  // Half-spectrum layout of a real transform (last resolved axis halved).
  std::size_t spectral_cells() const;
  // Wavenumber of spectral cell m. Odd-order operators drop the Nyquist
  // component (odd=true); even-order operators keep it.
  Vec3 wavenumber(std::size_t m, bool odd) const;
  // Multiplicity of spectral cell m in a Parseval sum over the full spectrum.
  double parseval_weight(std::size_t m) const;
};

}  // namespace vpb::solver
