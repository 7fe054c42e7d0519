#include "vpb/solver/scenario.hpp"

#include "vpb/solver/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace vpb::solver {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("solver: dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("solver: t_end must be nonnegative");
  if (record_every < 1) throw PreconditionError("solver: record_every must be >= 1");
}

long SolverConfig::steps() const {
  // The last step is shortened when t_end is not a multiple of dt.
  return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

namespace {

void step_with(KineticState& s, const SolverConfig& c, const SolverOperators& ops, double dt) {
  if (c.scheme == Scheme::lie) {
    if (c.transport_on) {
      transport_step(s, ops, dt);
      refresh_potential(s, ops);
    }
    if (c.field_on) field_step(s, ops, dt, FieldOrder::euler);
    if (c.collision_on) collision_step(s, ops, dt, CollisionScheme::implicit_euler, c.gamma_on);
  } else {
    const double h = 0.5 * dt;
    if (c.transport_on) {
      transport_step(s, ops, h);
      refresh_potential(s, ops);
    }
    if (c.field_on) field_step(s, ops, h, FieldOrder::rk2);
    if (c.collision_on) collision_step(s, ops, dt, CollisionScheme::exponential, c.gamma_on);
    if (c.field_on) field_step(s, ops, h, FieldOrder::rk2);
    if (c.transport_on) {
      transport_step(s, ops, h);
      refresh_potential(s, ops);
    }
  }
  s.time += dt;
}

}  // namespace

void step(KineticState& state, const SolverConfig& config, const SolverOperators& ops) {
  config.validate();
  step_with(state, config, ops, config.dt);
}

RecordedRun run_scenario(const KineticState& initial, const SolverConfig& config, const SolverOperators& ops) {
  config.validate();
  RecordedRun run;
  run.eps = initial.eps;
  KineticState s = initial;
  run.times.push_back(s.time);
  run.states.push_back(s);
  const long n = config.steps();
  const double dt = n > 0 ? config.t_end / double(n) : config.dt;
  for (long k = 1; k <= n; ++k) {
    try {
      step_with(s, config, ops, dt);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), k);
    }
    if (!s.f.allFinite() || !s.phi.allFinite()) throw NumericError("non-finite state", k);
    const Vector a = density(ops.vgrid, s.f);
    run.max_poisson_residual = std::max(run.max_poisson_residual, poisson_residual(ops.sgrid, s.phi, a));
    run.max_neutrality = std::max(run.max_neutrality, std::abs(spatial_mean(a)));
    if (k % config.record_every == 0 || k == n) {
      run.times.push_back(s.time);
      run.states.push_back(s);
    }
  }
  return run;
}

ConservationLedger conservation_report(const RecordedRun& run, const SolverOperators& ops) {
  if (run.states.empty()) throw PreconditionError("conservation_report: empty run");
  const auto& vg = ops.vgrid;
  const double dV = ops.sgrid.cell_volume();
  Vector e_test(static_cast<Eigen::Index>(vg.size()));
  for (std::size_t i = 0; i < vg.size(); ++i)
    e_test[static_cast<Eigen::Index>(i)] =
        0.5 * vg.nodes[i].squaredNorm() * vg.sqrt_mu[static_cast<Eigen::Index>(i)] * vg.quad_weights[static_cast<Eigen::Index>(i)];

  ConservationLedger L;
  double scale = 0.0;
  for (std::size_t r = 0; r < run.states.size(); ++r) {
    const KineticState& s = run.states[r];
    const MacroFields m = macro_fields(vg, s.f);
    const auto grad = gradient(ops.sgrid, s.phi);
    double fe = 0.0;
    for (const auto& g : grad) fe += g.squaredNorm();
    fe *= 0.5 * s.eps * dV;
    L.times.push_back(run.times[r]);
    L.mass.push_back(m.a.sum() * dV);
    L.momentum.emplace_back(m.b[0].sum() * dV, m.b[1].sum() * dV, m.b[2].sum() * dV);
    L.field_energy.push_back(fe);
    L.energy.push_back((s.f.transpose() * e_test).sum() * dV + fe);
    if (r == 0) {
      // L^1_x L^2_v size of the initial perturbation, linear in f like the ledger entries.
      for (Eigen::Index c = 0; c < s.f.cols(); ++c)
        scale += std::sqrt(vg.quad_weights[0]) * s.f.col(c).norm() * dV;
    }
  }
  for (std::size_t r = 0; r < L.times.size(); ++r) {
    L.mass_drift = std::max(L.mass_drift, std::abs(L.mass[r] - L.mass[0]));
    L.momentum_drift = std::max(L.momentum_drift, (L.momentum[r] - L.momentum[0]).norm());
    L.energy_drift = std::max(L.energy_drift, std::abs(L.energy[r] - L.energy[0]));
  }
  const double t_span = L.times.back() - L.times.front();
  L.mass_drift_rate = t_span > 0.0 ? L.mass_drift / t_span : 0.0;
  const double ref = scale > 0.0 ? scale : 1.0;
  L.momentum_drift_rel = L.momentum_drift / ref;
  L.energy_drift_rel = L.energy_drift / ref;
  return L;
}

}  // namespace vpb::solver
