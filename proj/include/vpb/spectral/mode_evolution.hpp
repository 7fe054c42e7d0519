#pragma once

#include "vpb/spectral/mode_operator.hpp"

#include <vector>

namespace vpb::spectral {

enum class Propagator {
  expm,      // exact: exp(dt B) by scaling and squaring, one per distinct dt
  strang,    // exact transport+field half steps around an exact collision step
};

struct EvolveOptions {
  Propagator propagator = Propagator::expm;
  bool check_monotone = true;
};

// Trajectory at t_grid (t_grid[0] must be 0). Throws NumericError when the
// mode energy increases by more than tol::mono * E(0) over a step.
std::vector<CVector> evolve_mode(const ModeOperator& mop, const CVector& fhat0, const std::vector<double>& t_grid,
                                 const EvolveOptions& opts = {});

}  // namespace vpb::spectral
