#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/collision.hpp"
#include "vpb/kinetic/linearized_operator.hpp"
#include "vpb/kinetic/macro_projection.hpp"
#include "vpb/solver/spatial_grid.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>

namespace vpb::solver {

// f is (velocity nodes x cells), column c is the velocity profile at cell c.
struct KineticState {
  double eps = 1.0;
  double time = 0.0;
  Matrix f;
  Vector phi;
};

struct MacroFields {
  Vector a;                 // <f, sqrt(mu)>
  std::array<Vector, 3> b;  // <f, v sqrt(mu)>
  Vector c;                 // <f, (|v|^2/3 - 1) sqrt(mu)>
};

MacroFields macro_fields(const kinetic::VelocityGrid& vgrid, const Matrix& f);
Vector density(const kinetic::VelocityGrid& vgrid, const Matrix& f);

enum class CollisionMode { full, bgk };

// Everything the stepper needs besides the state; immutable once built.
struct SolverOperators {
  SpatialGrid sgrid;
  kinetic::VelocityGrid vgrid;
  kinetic::PotentialModel model;
  kinetic::AngularQuadrature angular;
  CollisionMode mode = CollisionMode::bgk;
  std::shared_ptr<const kinetic::MacroProjector> proj;
  std::shared_ptr<const kinetic::LinearizedOperator> op;
  // Eigen-decomposition of L (full mode only): L = W diag(lambda) W^T.
  Matrix eigvecs;
  Vector eigvals;
  double nu0 = 1.0;
};

// For mode == full, `op` must be an assembled operator (the eigen-decomposition
// is computed here); for bgk it may be null and the surrogate is built.
SolverOperators make_solver_operators(const SpatialGrid& sgrid, const kinetic::VelocityGrid& vgrid,
                                      CollisionMode mode, double nu0, const kinetic::PotentialModel& model,
                                      const kinetic::AngularQuadrature& angular,
                                      std::shared_ptr<const kinetic::LinearizedOperator> op = nullptr);

struct InitialData {
  std::string preset = "macro_wave";  // zero | macro_wave | density_wave | random_macro
  double amplitude = 0.05;
  std::uint64_t seed = 1;
};

// Builds f0 and the consistent potential.
KineticState make_initial_state(const SolverOperators& ops, double eps, const InitialData& init);

}  // namespace vpb::solver
