#include "vpb/nsfp/transport_coefficients.hpp"

#include "vpb/kinetic/macro_projection.hpp"
#include "vpb/kinetic/maxwellian.hpp"

namespace vpb::nsfp {

void TransportCoefficients::validate() const {
  if (!(lambda > 0.0) || !(kappa > 0.0)) throw PreconditionError("transport coefficients must be positive");
}

TransportCoefficients compute_transport_coefficients(const kinetic::LinearizedOperator& op,
                                                     const kinetic::VelocityGrid& grid) {
  if (op.size() != grid.size()) throw PreconditionError("transport coefficients: operator/grid size mismatch");
  const kinetic::MacroProjector proj(grid);
  auto pair = [&](auto&& fn) {
    const Vector src = proj.micro(grid.sample(fn));
    const Vector sol = kinetic::invert_L_micro(op, grid, src);
    return grid.dot(src, sol);
  };
  double a_sum = 0.0, b_sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      a_sum += pair([&](const Vec3& v) {
        const double s = kinetic::sqrt_maxwellian(v);
        return (v[i] * v[j] - (i == j ? v.squaredNorm() / 3.0 : 0.0)) * s;
      });
    }
    b_sum += pair([&](const Vec3& v) {
      const double s = kinetic::sqrt_maxwellian(v);
      return v[i] * 0.5 * (v.squaredNorm() - 5.0) * s;
    });
  }
  TransportCoefficients tc{a_sum / 10.0, 2.0 * b_sum / 15.0};
  tc.validate();
  return tc;
}

}  // namespace vpb::nsfp
