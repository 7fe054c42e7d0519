#include "vpb/diagnostics/sup_norm.hpp"

#include "vpb/diagnostics/derivatives.hpp"

namespace vpb::diagnostics {

double weighted_sup_norm(const solver::KineticState& state, const solver::SolverOperators& ops,
                         const kinetic::WeightSpec& spec, int order) {
  if (order < 0 || order > 2) throw PreconditionError("weighted_sup_norm: order must be 0, 1 or 2");
  spec.validate();
  const auto& vg = ops.vgrid;
  Vector w(static_cast<Eigen::Index>(vg.size()));
  for (std::size_t i = 0; i < vg.size(); ++i)
    w[static_cast<Eigen::Index>(i)] = kinetic::weight_w_theta(spec, state.time, vg.nodes[i]);
  const auto list = multi_indices(order, ops.sgrid.dim);
  const auto d = derivatives(ops.sgrid, vg, state.f, list);
  double m = 0.0;
  for (const auto& D : d) m = std::max(m, (D.array().colwise() * w.array()).abs().maxCoeff());
  return m;
}

}  // namespace vpb::diagnostics
