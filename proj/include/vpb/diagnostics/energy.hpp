#pragma once

#include "vpb/kinetic/weights.hpp"
#include "vpb/solver/kinetic_state.hpp"

#include <string>
#include <utility>
#include <vector>

namespace vpb::diagnostics {

// Squared-norm functionals. Fields a report does not evaluate stay 0.
struct EnergyReport {
  double time = 0.0;
  double E_hard = 0.0;
  double Etilde_hard = 0.0;
  double E_soft_ell = 0.0;
  double D_hard = 0.0;
  double D_soft_ell = 0.0;
  std::vector<std::pair<std::string, double>> components;

  double component(const std::string& name) const;  // throws on unknown name
};

// E_hard = ||f||^2_{H^2_{x,v}} + ||grad phi||^2_{H^2} + ||w (I-P) f||^2_{H^1_x L^2_v},
// Etilde_hard, and D_hard with the nu-weighted micro norms. Hard model only.
EnergyReport energy_hard(const solver::KineticState& state, const solver::SolverOperators& ops);

// Soft weighted energy with weights w^{|beta|} and w^{|beta| - ell}. Soft model only.
EnergyReport energy_soft(const solver::KineticState& state, const solver::SolverOperators& ops,
                         const kinetic::WeightSpec& spec);
EnergyReport dissipation_soft(const solver::KineticState& state, const solver::SolverOperators& ops,
                              const kinetic::WeightSpec& spec);

}  // namespace vpb::diagnostics
