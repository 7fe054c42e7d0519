#pragma once

#include "vpb/nsfp/fluid.hpp"
#include "vpb/solver/scenario.hpp"

#include <array>
#include <vector>

namespace vpb::diagnostics {

struct HydroLimitRow {
  double eps = 0.0;
  double rho = 0.0;  // sup-time L^2_x errors
  double u = 0.0;
  double theta = 0.0;
  double grad_phi = 0.0;
  double total = 0.0;  // sqrt of the sum of squares of the four
  // Per-record errors (rho, u, theta, grad phi) behind the sup-time values.
  std::vector<double> times;
  std::vector<std::array<double, 4>> per_time;
};

struct HydroLimitTable {
  std::vector<HydroLimitRow> rows;  // sorted by decreasing eps
  double order = 0.0;               // least-squares slope of log total vs log eps
  bool strictly_decreasing = false;
};

// Moments (a, b, c) of f^eps against (rho, u, theta) and grad phi^eps against
// grad phi at matching record times. Rejects mismatched grids or times.
HydroLimitTable hydro_limit_error(const std::vector<solver::RecordedRun>& kinetic_runs, const nsfp::FluidRun& fluid,
                                  const solver::SolverOperators& ops);

// Fluid-shaped copy of a kinetic run (rho = a, u = b, theta = c, phi = phi^eps).
nsfp::FluidRun fluid_view(const solver::RecordedRun& run, const solver::SolverOperators& ops);

}  // namespace vpb::diagnostics
