#pragma once

#include "vpb/common.hpp"
#include "vpb/kinetic/potential_model.hpp"

namespace vpb::kinetic {

struct WeightSpec {
  double vartheta = 0.01;
  double sigma_exp = 1.0 / 24.0;
  double ell = 0.0;
  double ell0 = 0.0;
  double vartheta_cap = 0.05;

  void validate() const;
  double theta_tilde(double t) const;
};

inline double japanese_bracket(const Vec3& v) { return std::sqrt(1.0 + v.squaredNorm()); }

double weight_w(const PotentialModel& model, const Vec3& v);
double weight_w_theta(const WeightSpec& spec, double t, const Vec3& v);

}  // namespace vpb::kinetic
