#include "vpb/diagnostics/energy.hpp"

#include "vpb/diagnostics/derivatives.hpp"

#include <cmath>

namespace vpb::diagnostics {

using solver::KineticState;
using solver::SolverOperators;

double EnergyReport::component(const std::string& name) const {
  for (const auto& [k, v] : components)
    if (k == name) return v;
  throw PreconditionError("energy report: no component '" + name + "'");
}

namespace {

// Everything the functionals need, computed once per state.
struct Ingredients {
  std::vector<MultiIndex> list;
  std::vector<Matrix> df, dmicro, dmacro;
  Matrix micro, macro;
};

Ingredients prepare(const KineticState& s, const SolverOperators& ops) {
  Ingredients in;
  in.list = multi_indices(2, ops.sgrid.dim);
  in.micro = s.f;
  ops.proj->micro_inplace(in.micro);
  in.macro = s.f - in.micro;
  in.df = derivatives(ops.sgrid, ops.vgrid, s.f, in.list);
  in.dmicro = derivatives(ops.sgrid, ops.vgrid, in.micro, in.list);
  in.dmacro = derivatives(ops.sgrid, ops.vgrid, in.macro, in.list);
  return in;
}

Vector node_weight(const SolverOperators& ops, double power) {
  const auto& vg = ops.vgrid;
  Vector w(static_cast<Eigen::Index>(vg.size()));
  for (std::size_t i = 0; i < vg.size(); ++i)
    w[static_cast<Eigen::Index>(i)] = std::pow(kinetic::weight_w(ops.model, vg.nodes[i]), power);
  return w;
}

// sum over list entries accepted by `keep` of ||W_(entry) d F||^2.
template <class Keep, class Weight>
double sum_norms(const SolverOperators& ops, const Ingredients& in, const std::vector<Matrix>& d, Keep keep,
                 Weight weight) {
  double s = 0.0;
  for (std::size_t j = 0; j < in.list.size(); ++j)
    if (keep(in.list[j])) s += weighted_sq_norm(ops.sgrid, ops.vgrid, d[j], weight(in.list[j]));
  return s;
}

// sum_{lo <= |alpha| <= hi} of ||d^alpha grad^extra phi||^2 with the vector
// (extra = 1) or matrix (extra = 2) entries summed.
double phi_norm(const solver::SpatialGrid& g, const Vector& phi, int lo, int hi, int extra) {
  double s = 0.0;
  for (const auto& mi : multi_indices(hi, g.dim, lo, hi, 0)) {
    for (int i = 0; i < g.dim; ++i) {
      for (int j = 0; j < (extra == 2 ? g.dim : 1); ++j) {
        Index3 a = mi.alpha;
        a[i] += 1;
        if (extra == 2) a[j] += 1;
        s += field_sq_norm(g, x_derivative(g, phi, a));
      }
    }
  }
  return s;
}

// ||grad_x Pf||^2_{H^1_{x,v}}: first x-derivatives of every (alpha, beta) with
// |alpha| + |beta| <= 1, vector entries summed.
double grad_macro_h1(const SolverOperators& ops, const Matrix& macro) {
  const auto& g = ops.sgrid;
  double s = 0.0;
  for (int i = 0; i < g.dim; ++i) {
    Index3 e{};
    e[i] = 1;
    const Matrix d = x_derivative(g, macro, e);
    s += sq_norm(g, ops.vgrid, d);
    for (const auto& mi : multi_indices(1, g.dim, 0, 1)) {
      if (mi.order() != 1) continue;
      s += sq_norm(g, ops.vgrid, v_derivative(ops.vgrid, x_derivative(g, d, mi.alpha), mi.beta));
    }
  }
  return s;
}

}  // namespace

EnergyReport energy_hard(const KineticState& s, const SolverOperators& ops) {
  if (!ops.model.hard()) throw PreconditionError("energy_hard: hard potential required");
  const Ingredients in = prepare(s, ops);
  const auto all = [](const MultiIndex&) { return true; };
  const auto h1x = [](const MultiIndex& m) { return m.v_order() == 0 && m.x_order() <= 1; };
  const auto dx12 = [](const MultiIndex& m) { return m.v_order() == 0 && m.x_order() >= 1; };
  const Vector one = Vector::Ones(static_cast<Eigen::Index>(ops.vgrid.size()));
  const Vector w2 = node_weight(ops, 2.0);
  const Vector& nu = ops.op->nu;
  const Vector w2nu = w2.cwiseProduct(nu);
  const double eps2 = s.eps * s.eps;
  auto flat = [&](const MultiIndex&) { return one; };
  auto wt = [&](const MultiIndex&) { return w2; };

  const double f_h2 = sum_norms(ops, in, in.df, all, flat);
  const double phi_h2 = phi_norm(ops.sgrid, s.phi, 0, 2, 1);
  const double wf_h1 = sum_norms(ops, in, in.df, h1x, wt);
  const double wmicro_h1 = sum_norms(ops, in, in.dmicro, h1x, wt);
  const double dxf = sum_norms(ops, in, in.df, dx12, flat);
  const double dxphi = phi_norm(ops.sgrid, s.phi, 1, 2, 1);
  const double micro_h2 = sum_norms(ops, in, in.dmicro, all, flat);
  const double micro_h2_nu = sum_norms(ops, in, in.dmicro, all, [&](const MultiIndex&) { return nu; });
  const double wmicro_h1_nu = sum_norms(ops, in, in.dmicro, h1x, [&](const MultiIndex&) { return w2nu; });
  const double gradP = grad_macro_h1(ops, in.macro);
  const double hess_phi = phi_norm(ops.sgrid, s.phi, 0, 1, 2);

  EnergyReport r;
  r.time = s.time;
  r.E_hard = f_h2 + phi_h2 + wf_h1;
  r.Etilde_hard = dxf + dxphi + micro_h2 + wmicro_h1;
  r.D_hard = micro_h2_nu / eps2 + wmicro_h1_nu / eps2 + gradP + hess_phi;
  r.components = {{"f_H2", f_h2},
                  {"grad_phi_H2", phi_h2},
                  {"w_f_H1L2", wf_h1},
                  {"w_micro_H1L2", wmicro_h1},
                  {"dx_f_H2", dxf},
                  {"dx_grad_phi_H1", dxphi},
                  {"micro_H2", micro_h2},
                  {"micro_H2_nu", micro_h2_nu},
                  {"w_micro_H1L2_nu", wmicro_h1_nu},
                  {"grad_Pf_H1", gradP},
                  {"hess_phi_H1", hess_phi}};
  return r;
}

namespace {

struct SoftWeights {
  std::vector<Vector> beta;      // w^{2|beta|}, index |beta|
  std::vector<Vector> beta_ell;  // w^{2(|beta| - ell)}
};

SoftWeights soft_weights(const SolverOperators& ops, double ell) {
  SoftWeights sw;
  for (int b = 0; b <= 2; ++b) {
    sw.beta.push_back(node_weight(ops, 2.0 * b));
    sw.beta_ell.push_back(node_weight(ops, 2.0 * (b - ell)));
  }
  return sw;
}

}  // namespace

EnergyReport energy_soft(const KineticState& s, const SolverOperators& ops, const kinetic::WeightSpec& spec) {
  if (ops.model.hard()) throw PreconditionError("energy_soft: soft potential required");
  const Ingredients in = prepare(s, ops);
  const SoftWeights sw = soft_weights(ops, spec.ell);
  const auto all = [](const MultiIndex&) { return true; };
  const auto low_x = [](const MultiIndex& m) { return m.x_order() <= 1; };
  const auto dxx = [](const MultiIndex& m) { return m.x_order() == 2; };

  const double wf = sum_norms(ops, in, in.df, all, [&](const MultiIndex& m) { return sw.beta[m.v_order()]; });
  const double phi_h2 = phi_norm(ops.sgrid, s.phi, 0, 2, 1);
  const double wlf = sum_norms(ops, in, in.df, low_x, [&](const MultiIndex& m) { return sw.beta_ell[m.v_order()]; });
  const double dxx_f = sum_norms(ops, in, in.df, dxx, [&](const MultiIndex&) { return sw.beta_ell[0]; });

  EnergyReport r;
  r.time = s.time;
  r.E_soft_ell = wf + phi_h2 + wlf + s.eps * dxx_f;
  r.components = {{"w_beta_f_H2", wf},
                  {"grad_phi_H2", phi_h2},
                  {"w_beta_minus_ell_f", wlf},
                  {"w_minus_ell_dxx_f", dxx_f}};
  return r;
}

EnergyReport dissipation_soft(const KineticState& s, const SolverOperators& ops, const kinetic::WeightSpec& spec) {
  if (ops.model.hard()) throw PreconditionError("dissipation_soft: soft potential required");
  const Ingredients in = prepare(s, ops);
  const SoftWeights sw = soft_weights(ops, spec.ell);
  const Vector& nu = ops.op->nu;
  const auto all = [](const MultiIndex&) { return true; };
  const auto low_x = [](const MultiIndex& m) { return m.x_order() <= 1; };
  const auto dxx = [](const MultiIndex& m) { return m.x_order() == 2; };
  const double eps = s.eps;

  const double gradP = grad_macro_h1(ops, in.macro);
  const double hess_phi = phi_norm(ops.sgrid, s.phi, 0, 1, 2);
  const double wm = sum_norms(ops, in, in.dmicro, all,
                              [&](const MultiIndex& m) { return Vector(sw.beta[m.v_order()].cwiseProduct(nu)); });
  const double wlm = sum_norms(ops, in, in.dmicro, low_x,
                               [&](const MultiIndex& m) { return Vector(sw.beta_ell[m.v_order()].cwiseProduct(nu)); });
  const double dxx_m =
      sum_norms(ops, in, in.dmicro, dxx, [&](const MultiIndex&) { return Vector(sw.beta_ell[0].cwiseProduct(nu)); });

  EnergyReport r;
  r.time = s.time;
  r.D_soft_ell = gradP + hess_phi + wm / (eps * eps) + wlm / (eps * eps) + dxx_m / eps;
  r.components = {{"grad_Pf_H1", gradP},
                  {"hess_phi_H1", hess_phi},
                  {"w_beta_micro_nu", wm},
                  {"w_beta_minus_ell_micro_nu", wlm},
                  {"w_minus_ell_dxx_micro_nu", dxx_m}};
  return r;
}

}  // namespace vpb::diagnostics
