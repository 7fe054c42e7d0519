#pragma once

#include "vpb/spectral/decay.hpp"
#include "vpb/spectral/mode_evolution.hpp"
#include "vpb/spectral/mode_operator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vpb::spectral {

struct RadialKGrid {
  std::vector<double> nodes;
  std::vector<double> weights;  // for int_{kmin}^{kmax} F(k) dk (trapezoid in log k)
};

RadialKGrid log_k_grid(double k_min = 1e-3, double k_max = 8.0, int count = 48);

struct WholeSpaceNorms {
  DecaySeries l2;      // ||f||^2
  DecaySeries grad_x;  // ||grad_x f||^2
  DecaySeries grad_phi;  // ||grad_x phi||^2
  std::vector<std::string> warnings;
};

// Radially reduced synthesis: each node is evolved at k = |k| e1 and weighted
// by 4 pi |k|^2. `initial` returns the coordinates of fhat0 at |k|,
// `factory` the mode operator at |k|.
WholeSpaceNorms synthesize_whole_space_norms(const RadialKGrid& kgrid,
                                             const std::function<CVector(double)>& initial,
                                             const std::function<ModeOperator(double)>& factory,
                                             const std::vector<double>& t_grid, const EvolveOptions& opts = {});

// Isotropic presets. "chi_sqrt_mu": chi(|k| <= 1) sqrt(mu);
// "chi_temperature": chi(|k| <= 1) (|v|^2 - 3)/2 sqrt(mu) (neutral).
std::function<CVector(double)> isotropic_preset(const std::string& name, const ModeBasis& basis,
                                                const kinetic::VelocityGrid& grid);

}  // namespace vpb::spectral
