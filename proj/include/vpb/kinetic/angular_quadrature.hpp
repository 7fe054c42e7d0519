#pragma once

#include "vpb/common.hpp"

#include <vector>

namespace vpb::kinetic {

// Product rule on S^2: Gauss-Legendre in cos(theta) on each hemisphere times a
// uniform azimuthal rule. Directions are given in the frame whose pole is e3;
// the node set is closed under omega -> -omega.
struct AngularQuadrature {
  int n_polar = 0;    // Gauss nodes per hemisphere
  int n_azimuth = 0;  // even
  std::vector<Vec3> directions;
  std::vector<double> weights;

  double total_weight() const;
  // Sum of weights * |cos theta|, which is 2 pi up to rounding.
  double abs_cos_moment() const;
};

// The default (3, 6) integrates products of quadratic polynomials in v' exactly.
AngularQuadrature make_angular_quadrature(int n_polar = 3, int n_azimuth = 6);

// Gauss-Legendre nodes and weights on [a, b] (Golub-Welsch).
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

}  // namespace vpb::kinetic
