#pragma once

#include "vpb/solver/kinetic_state.hpp"
#include "vpb/solver/substeps.hpp"

#include <vector>

namespace vpb::solver {

enum class Scheme { lie, strang };

struct SolverConfig {
  double dt = 1e-2;
  Scheme scheme = Scheme::strang;
  double t_end = 1.0;
  int record_every = 1;
  bool gamma_on = true;
  bool transport_on = true;
  bool field_on = true;
  bool collision_on = true;

  void validate() const;
  long steps() const;
};

// Advances the state by dt (Lie: T, Poisson, F, C; Strang: T/2, Poisson, F/2,
// C, F/2, T/2, Poisson).
void step(KineticState& state, const SolverConfig& config, const SolverOperators& ops);

struct RecordedRun {
  double eps = 1.0;
  std::vector<double> times;
  std::vector<KineticState> states;
  double max_poisson_residual = 0.0;  // relative, over every step
  double max_neutrality = 0.0;        // |mean a| over every step
};

// Aborts with NumericError(step) on NaN/Inf.
RecordedRun run_scenario(const KineticState& initial, const SolverConfig& config, const SolverOperators& ops);

struct ConservationLedger {
  std::vector<double> times;
  std::vector<double> mass;                // sum_x a dx
  std::vector<Vec3> momentum;              // sum_x b dx
  std::vector<double> energy;              // sum_x <|v|^2/2 sqrt(mu), f> dx + (eps/2)||grad phi||^2
  std::vector<double> field_energy;        // (eps/2)||grad phi||^2
  double mass_drift = 0.0;                 // max |mass - mass0|
  double mass_drift_rate = 0.0;            // mass_drift / t_end
  double momentum_drift = 0.0;
  double energy_drift = 0.0;
  double momentum_drift_rel = 0.0;         // relative to the initial scale of f
  double energy_drift_rel = 0.0;
};

ConservationLedger conservation_report(const RecordedRun& run, const SolverOperators& ops);

}  // namespace vpb::solver
