#pragma once

#include "vpb/kinetic/weights.hpp"
#include "vpb/solver/kinetic_state.hpp"

namespace vpb::diagnostics {

// max over nodes and |alpha| + |beta| <= order of |w_theta(t, v) d^alpha_beta f|,
// t = state.time.
double weighted_sup_norm(const solver::KineticState& state, const solver::SolverOperators& ops,
                         const kinetic::WeightSpec& spec, int order);

}  // namespace vpb::diagnostics
