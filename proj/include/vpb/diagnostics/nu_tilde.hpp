#pragma once

#include "vpb/kinetic/angular_quadrature.hpp"
#include "vpb/kinetic/potential_model.hpp"
#include "vpb/kinetic/velocity_grid.hpp"
#include "vpb/kinetic/weights.hpp"

#include <functional>
#include <vector>

namespace vpb::diagnostics {

// nu~ = nu + eps^2 [ (v/2 + 2 theta~(t) v) . grad phi + vartheta sigma |v|^2 / (1+t)^{1+sigma} ].
double nu_tilde(const kinetic::WeightSpec& spec, double nu, double eps, double t, const Vec3& v,
                const Vec3& grad_phi);

// rho = (sigma gamma + 2) / (2 - gamma).
double varrho(const kinetic::WeightSpec& spec, const kinetic::PotentialModel& model);

struct NuTildeSamples {
  std::vector<double> times;
  std::vector<double> speeds;
  // refine = 2 doubles the density in both directions (nested).
  static NuTildeSamples default_set(int refine = 1);
};

struct NuTildeCheck {
  double min_ratio = 0.0;
  double worst_t = 0.0;
  Vec3 worst_v = Vec3::Zero();
  kinetic::WeightSpec spec;
  double eps = 1.0;
  double varrho = 0.0;
};

// Field magnitude bound |grad phi|(t); the sampled field is anti-parallel to
// v, the least favourable orientation.
using FieldBound = std::function<double(double)>;
FieldBound decaying_field_bound(double delta);  // delta (1+t)^{-5/4}

// min over samples of (1/eps^2) nu~ / [eps^{-4/5} (1+t)^{rho-1}], with nu
// from the velocity-grid quadrature.
NuTildeCheck nu_tilde_bound_check(const kinetic::WeightSpec& spec, const kinetic::PotentialModel& model,
                                  const kinetic::VelocityGrid& grid, const kinetic::AngularQuadrature& angular,
                                  double eps, const FieldBound& field, const NuTildeSamples& samples);

}  // namespace vpb::diagnostics
