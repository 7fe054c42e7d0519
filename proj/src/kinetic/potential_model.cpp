#include "vpb/kinetic/potential_model.hpp"

#include "vpb/common.hpp"

#include <cmath>

namespace vpb::kinetic {

PotentialModel PotentialModel::make(double gamma, double angular_amplitude) {
  if (!(gamma > -3.0 && gamma <= 1.0)) throw PreconditionError("gamma must lie in (-3, 1]");
  if (!(angular_amplitude > 0.0) || !std::isfinite(angular_amplitude))
    throw PreconditionError("angular_amplitude must be positive");
  PotentialModel m;
  m.gamma = gamma;
  m.angular_amplitude = angular_amplitude;
  m.classification = gamma >= 0.0 ? PotentialClass::hard : PotentialClass::soft;
  return m;
}

}  // namespace vpb::kinetic
