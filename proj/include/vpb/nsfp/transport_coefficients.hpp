#pragma once

#include "vpb/kinetic/linearized_operator.hpp"
#include "vpb/kinetic/velocity_grid.hpp"

namespace vpb::nsfp {

struct TransportCoefficients {
  double lambda = 1.0;  // viscosity
  double kappa = 1.0;   // heat conductivity
  void validate() const;
};

// lambda = (1/10) sum_ij <A_ij, L^{-1} A_ij>, kappa = (2/15) sum_i <B_i, L^{-1} B_i>
// with A = (v v - |v|^2/3 I) sqrt(mu), B = v (|v|^2 - 5)/2 sqrt(mu). The
// sources are projected onto the discrete micro subspace before inversion.
TransportCoefficients compute_transport_coefficients(const kinetic::LinearizedOperator& op,
                                                     const kinetic::VelocityGrid& grid);

}  // namespace vpb::nsfp
