#pragma once

#include "vpb/solver/scenario.hpp"

#include <string>
#include <vector>

namespace vpb::diagnostics {

// Residuals of the local balance laws
//   d_t a = -(1/eps) div b
//   d_t b = -(1/eps) grad(a + c + phi) - a grad phi - (1/eps) div <v v sqrt(mu), (I-P) f>
//   d_t c = -(2/(3 eps)) div b - (2/3) grad phi . b - (1/(3 eps)) div <v |v|^2 sqrt(mu), (I-P) f>
// with d_t replaced by central differences of the recorded moments.
struct BalanceResiduals {
  std::vector<double> times;  // interior record times
  std::vector<double> mass;   // L^2_x norms
  std::vector<double> momentum;
  std::vector<double> energy;
  std::vector<std::string> warnings;
};

BalanceResiduals macro_balance_residual(const solver::RecordedRun& run, const solver::SolverOperators& ops);

// (eps, trapezoidal integral of ||(I-P) f||^2_{L^2_{x,v}} over the recorded times).
std::pair<double, double> micro_part_smallness(const solver::RecordedRun& run, const solver::SolverOperators& ops);

}  // namespace vpb::diagnostics
