#include "vpb/kinetic/weights.hpp"

#include <cmath>

namespace vpb::kinetic {

void WeightSpec::validate() const {
  if (!(vartheta > 0.0) || !(vartheta <= vartheta_cap))
    throw PreconditionError("vartheta must lie in (0, vartheta_cap]");
  if (!(sigma_exp > 0.0 && sigma_exp <= 0.25)) throw PreconditionError("sigma must lie in (0, 1/4]");
}

double WeightSpec::theta_tilde(double t) const {
  return vartheta * (1.0 + std::pow(1.0 + t, -sigma_exp));
}

double weight_w(const PotentialModel& model, const Vec3& v) {
  const double b = japanese_bracket(v);
  return model.hard() ? b : std::pow(b, model.gamma);
}

double weight_w_theta(const WeightSpec& spec, double t, const Vec3& v) {
  return std::exp(spec.theta_tilde(t) * v.squaredNorm());
}

}  // namespace vpb::kinetic
