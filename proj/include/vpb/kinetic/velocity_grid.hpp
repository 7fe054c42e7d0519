#pragma once

#include "vpb/common.hpp"

#include <vector>

namespace vpb::kinetic {

// Uniform tensor grid on [-R, R]^3 with cell-centred nodes and equal weights.
// Node (i, j, k) has flat index (i * N + j) * N + k.
struct VelocityGrid {
  int per_axis_count = 0;
  double truncation_radius = 0.0;
  double spacing = 0.0;
  std::vector<Vec3> nodes;
  Vector quad_weights;
  Vector mu;       // Maxwellian at the nodes
  Vector sqrt_mu;  // its square root

  std::size_t size() const { return nodes.size(); }
  double axis_value(int i) const { return -truncation_radius + (i + 0.5) * spacing; }
  int index(int i, int j, int k) const { return (i * per_axis_count + j) * per_axis_count + k; }
  // Weighted inner product and norm of nodal profiles.
  double dot(const Vector& f, const Vector& g) const;
  double norm(const Vector& f) const;
  // Discretize a function of v onto the nodes.
  template <class F>
  Vector sample(F&& fn) const {
    Vector out(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) out[static_cast<Eigen::Index>(i)] = fn(nodes[i]);
    return out;
  }
};

struct GridMoments {
  double mass;
  double second;
};

GridMoments grid_moments(int per_axis_count, double truncation_radius);

// Throws PreconditionError on bad arguments or when the Gaussian moments are
// not reproduced within tol::moment (under-resolution).
VelocityGrid build_velocity_grid(int per_axis_count, double truncation_radius);

}  // namespace vpb::kinetic
