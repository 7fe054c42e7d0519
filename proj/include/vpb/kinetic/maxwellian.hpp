#pragma once

#include "vpb/common.hpp"

#include <cmath>

namespace vpb::kinetic {

inline constexpr double kMaxwellianNorm = 0.06349363593424097;  // (2 pi)^(-3/2)

inline double maxwellian(const Vec3& v) { return kMaxwellianNorm * std::exp(-0.5 * v.squaredNorm()); }

inline double sqrt_maxwellian(const Vec3& v) {
  return std::sqrt(kMaxwellianNorm) * std::exp(-0.25 * v.squaredNorm());
}

}  // namespace vpb::kinetic
