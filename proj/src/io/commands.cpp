#include "vpb/io/commands.hpp"

#include "vpb/diagnostics/characteristics.hpp"
#include "vpb/diagnostics/energy.hpp"
#include "vpb/diagnostics/hydro_limit.hpp"
#include "vpb/diagnostics/macro_balance.hpp"
#include "vpb/diagnostics/nu_tilde.hpp"
#include "vpb/diagnostics/sup_norm.hpp"
#include "vpb/io/manifest.hpp"
#include "vpb/kinetic/linearized_operator.hpp"
#include "vpb/nsfp/fluid.hpp"
#include "vpb/nsfp/transport_coefficients.hpp"
#include "vpb/solver/fourier.hpp"
#include "vpb/solver/scenario.hpp"
#include "vpb/spectral/decay.hpp"
#include "vpb/spectral/whole_space.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <ostream>

namespace vpb::io {

namespace {

using solver::CollisionMode;

struct Context {
  const ScenarioConfig& cfg;
  RunArtifacts& art;
  std::ostream& log;
  std::string gate_message;  // non-empty => exit 4
};

void gate(Context& ctx, bool ok, const std::string& what) {
  if (ok) return;
  if (!ctx.gate_message.empty()) ctx.gate_message += "; ";
  ctx.gate_message += what;
}

kinetic::PotentialModel model_of(const ScenarioConfig& c) {
  return kinetic::PotentialModel::make(c.gamma, c.angular_amplitude);
}

kinetic::AngularQuadrature angular_of(const ScenarioConfig& c) {
  return kinetic::make_angular_quadrature(c.angular_polar, c.angular_azimuth);
}

std::shared_ptr<const kinetic::LinearizedOperator> linear_operator(const ScenarioConfig& c, const std::string& mode,
                                                                   const kinetic::VelocityGrid& vg) {
  if (mode == "bgk") return std::make_shared<kinetic::LinearizedOperator>(kinetic::make_bgk_operator(vg, c.nu0));
  kinetic::AssemblyOptions o;
  o.estimate_gap = false;
  return std::make_shared<kinetic::LinearizedOperator>(kinetic::assemble_linearized(model_of(c), vg, angular_of(c), o));
}

solver::SolverOperators solver_operators(const ScenarioConfig& c) {
  const auto sg = solver::SpatialGrid::make(c.space_count, c.space_length, c.space_dim);
  const auto vg = kinetic::build_velocity_grid(c.velocity_count, c.velocity_radius);
  const auto mode = c.collision == "full" ? CollisionMode::full : CollisionMode::bgk;
  return solver::make_solver_operators(sg, vg, mode, c.nu0, model_of(c), angular_of(c),
                                       linear_operator(c, c.collision, vg));
}

solver::SolverConfig solver_config(const ScenarioConfig& c, double eps) {
  solver::SolverConfig s;
  s.dt = c.time_step(eps);
  s.scheme = c.scheme == "lie" ? solver::Scheme::lie : solver::Scheme::strang;
  s.t_end = c.t_end;
  s.record_every = c.record_every;
  s.gamma_on = c.gamma_on;
  s.validate();
  return s;
}

solver::InitialData initial_of(const ScenarioConfig& c) { return {c.preset, c.amplitude, c.seed}; }

double micro_sq(const solver::KineticState& s, const solver::SolverOperators& ops) {
  Matrix m = s.f;
  ops.proj->micro_inplace(m);
  return m.squaredNorm() * ops.vgrid.quad_weights[0] * ops.sgrid.cell_volume();
}

// Record stride that lands exactly on multiples of `interval`.
int stride_for(double interval, double dt, const char* what) {
  const double r = interval / dt;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - double(n)) > 1e-9 * r)
    throw PreconditionError(std::string(what) + ": record interval " + format_double(interval) +
                            " is not a multiple of dt " + format_double(dt));
  return static_cast<int>(n);
}

std::string eps_tag(double eps) { return "eps" + format_double(eps); }

// ---------------------------------------------------------------------------

void cmd_operator_audit(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto model = model_of(c);
  const auto ang = angular_of(c);
  auto assess = [&](int count) {
    const auto vg = kinetic::build_velocity_grid(count, c.velocity_radius);
    ctx.log << "assembling L on N_v = " << count << "\n";
    auto op = kinetic::assemble_linearized(model, vg, ang);
    return std::make_pair(op, count == c.velocity_count ? kinetic::audit_kernel(op) : kinetic::KernelAudit{});
  };
  const auto [op, audit] = assess(c.velocity_count);
  const double sigma0 = op.sigma0_estimate;
  const double sym_tol = op.tol_sym();
  const auto refined = assess(c.audit_refined_count).first;
  const double change = std::abs(refined.sigma0_estimate - sigma0) / std::abs(sigma0);

  Json r;
  r["gamma"] = c.gamma;
  r["velocity_count"] = c.velocity_count;
  r["velocity_radius"] = c.velocity_radius;
  r["kernel_dimension"] = audit.kernel_dimension;
  r["kernel_threshold"] = audit.threshold;
  r["lambda6"] = audit.lambda6;
  r["symmetry_defect"] = op.symmetry_defect;
  r["symmetry_defect_raw"] = op.symmetry_defect_raw;
  r["symmetry_tolerance"] = sym_tol;
  r["kernel_defect"] = op.kernel_defect;
  r["kernel_defect_raw"] = op.kernel_defect_raw;
  r["diag_nu_norm"] = op.diag_nu_norm();
  r["nu_min"] = op.nu.minCoeff();
  r["nu_max"] = op.nu.maxCoeff();
  r["sigma0_estimate"] = sigma0;
  r["refined_velocity_count"] = c.audit_refined_count;
  r["sigma0_refined"] = refined.sigma0_estimate;
  r["sigma0_relative_change"] = change;

  gate(ctx, op.symmetry_defect <= sym_tol, "symmetry defect above tolerance");
  gate(ctx, audit.kernel_dimension == 5, "kernel dimension " + std::to_string(audit.kernel_dimension) + " != 5");
  gate(ctx, sigma0 > 0.0, "sigma0 estimate not positive");
  gate(ctx, change <= 0.2, "sigma0 changes by more than 20% under refinement");
  r["gate_passed"] = ctx.gate_message.empty();
  ctx.art.write_json("report.json", r);
}

void cmd_linear_decay(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto vg = kinetic::build_velocity_grid(c.velocity_count, c.velocity_radius);
  const auto op = linear_operator(c, c.decay_collision, vg);
  const auto basis = spectral::ModeBasis::axial(vg);
  const Matrix Lr = basis.restrict_operator(op->L);
  const auto kgrid = spectral::log_k_grid(c.decay_k_min, c.decay_k_max, c.decay_k_count);
  std::vector<double> tg;
  for (long n = 0; n * c.decay_sample_dt <= c.decay_t_end * (1 + 1e-12); ++n) tg.push_back(n * c.decay_sample_dt);
  spectral::EvolveOptions eo;
  eo.propagator = c.decay_propagator == "strang" ? spectral::Propagator::strang : spectral::Propagator::expm;
  ctx.log << "synthesizing " << kgrid.nodes.size() << " modes, basis size " << basis.size() << "\n";
  const auto ws = spectral::synthesize_whole_space_norms(
      kgrid, spectral::isotropic_preset(c.decay_preset, basis, vg),
      [&](double k) { return spectral::assemble_mode_operator_reduced(Lr, basis, Vec3(k, 0, 0), c.eps, vg); }, tg,
      eo);

  TimeSeries ts;
  ts.labels = {"t", "l2_sq", "grad_x_sq", "grad_phi_sq"};
  for (std::size_t i = 0; i < tg.size(); ++i)
    ts.add_row({tg[i], ws.l2.values[i], ws.grad_x.values[i], ws.grad_phi.values[i]});
  ctx.art.write_csv("decay.csv", ts);

  Json r;
  r["eps"] = c.eps;
  r["preset"] = c.decay_preset;
  r["collision"] = c.decay_collision;
  r["window"] = {c.decay_window_lo, c.decay_window_hi};
  Json fits;
  for (const auto* s : {&ws.l2, &ws.grad_x, &ws.grad_phi}) {
    const auto f = spectral::fit_decay_exponent(s->sqrt(), {c.decay_window_lo, c.decay_window_hi});
    fits[s->label] = {{"exponent", f.exponent}, {"intercept", f.intercept}, {"log_residual", f.residual}};
  }
  r["fits"] = fits;
  r["warnings"] = ws.warnings;
  ctx.art.write_json("report.json", r);
}

void cmd_nonlinear_run(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto ops = solver_operators(c);
  const auto sc = solver_config(c, c.eps);
  const auto s0 = solver::make_initial_state(ops, c.eps, initial_of(c));
  ctx.log << "nonlinear run: eps " << c.eps << ", dt " << sc.dt << ", " << sc.steps() << " steps\n";
  const auto run = solver::run_scenario(s0, sc, ops);
  const auto ledger = solver::conservation_report(run, ops);
  const bool hard = ops.model.hard();

  TimeSeries ts;
  ts.labels = {"t", "mass", "momentum_1", "momentum_2", "momentum_3", "energy", "field_energy", "micro_sq",
               hard ? "E_hard" : "E_soft", hard ? "D_hard" : "D_soft", "sup_w_f"};
  for (std::size_t i = 0; i < run.states.size(); ++i) {
    const auto& s = run.states[i];
    double E = 0.0, D = 0.0;
    if (hard) {
      const auto e = diagnostics::energy_hard(s, ops);
      E = e.E_hard;
      D = e.D_hard;
    } else {
      E = diagnostics::energy_soft(s, ops, c.weights).E_soft_ell;
      D = diagnostics::dissipation_soft(s, ops, c.weights).D_soft_ell;
    }
    ts.add_row({run.times[i], ledger.mass[i], ledger.momentum[i].x(), ledger.momentum[i].y(), ledger.momentum[i].z(),
                ledger.energy[i], ledger.field_energy[i], micro_sq(s, ops), E, D,
                diagnostics::weighted_sup_norm(s, ops, c.weights, 0)});
  }
  ctx.art.write_csv("timeseries.csv", ts);

  Json r;
  r["eps"] = c.eps;
  r["dt"] = sc.dt;
  r["steps"] = sc.steps();
  r["records"] = run.states.size();
  r["mass_drift"] = ledger.mass_drift;
  r["mass_drift_rate"] = ledger.mass_drift_rate;
  r["momentum_drift_rel"] = ledger.momentum_drift_rel;
  r["energy_drift_rel"] = ledger.energy_drift_rel;
  r["max_poisson_residual"] = run.max_poisson_residual;
  r["max_neutrality"] = run.max_neutrality;
  r["micro_integral"] = diagnostics::micro_part_smallness(run, ops).second;
  if (run.states.size() >= 3) {
    const auto bal = diagnostics::macro_balance_residual(run, ops);
    TimeSeries bt;
    bt.labels = {"t", "mass_residual", "momentum_residual", "energy_residual"};
    for (std::size_t i = 0; i < bal.times.size(); ++i)
      bt.add_row({bal.times[i], bal.mass[i], bal.momentum[i], bal.energy[i]});
    ctx.art.write_csv("balance.csv", bt);
    r["balance_warnings"] = bal.warnings;
  }
  ctx.art.write_json("report.json", r);
}

void cmd_nsfp_run(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto ops = solver_operators(c);
  const auto coeffs = nsfp::compute_transport_coefficients(*ops.op, ops.vgrid);
  const auto s0 = solver::make_initial_state(ops, c.eps, initial_of(c));
  const auto m0 = solver::macro_fields(ops.vgrid, s0.f);
  const auto fs = nsfp::make_fluid_state(ops.sgrid, m0.a, m0.b, m0.c);
  nsfp::FluidConfig fc;
  fc.dt = c.hydro_fluid_dt;
  fc.t_end = c.t_end;
  fc.record_every = stride_for(c.hydro_record_interval, fc.dt, "nsfp-run");
  const auto run = nsfp::nsfp_run(ops.sgrid, fs, coeffs, fc);

  TimeSeries ts;
  ts.labels = {"t", "kinetic_energy", "rho_l2", "theta_l2", "constraint_residual", "divergence_max"};
  const double dv = ops.sgrid.cell_volume();
  for (std::size_t i = 0; i < run.states.size(); ++i) {
    const auto& s = run.states[i];
    ts.add_row({run.times[i], run.kinetic_energy[i], std::sqrt(s.rho.squaredNorm() * dv),
                std::sqrt(s.theta.squaredNorm() * dv), nsfp::constraint_residual(ops.sgrid, s.rho, s.theta),
                nsfp::divergence(ops.sgrid, s.u).cwiseAbs().maxCoeff()});
  }
  ctx.art.write_csv("nsfp.csv", ts);

  Json r;
  r["lambda"] = coeffs.lambda;
  r["kappa"] = coeffs.kappa;
  r["collision"] = c.collision;
  r["fluid_dt"] = fc.dt;
  r["max_constraint_residual"] = run.max_constraint_residual;
  r["max_divergence"] = run.max_divergence;
  ctx.art.write_json("report.json", r);
}

void cmd_hydro_limit(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto ops = solver_operators(c);
  const auto coeffs = nsfp::compute_transport_coefficients(*ops.op, ops.vgrid);
  std::vector<solver::RecordedRun> runs;
  nsfp::FluidRun fluid;
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    const double eps = c.eps_list[i];
    auto sc = solver_config(c, eps);
    sc.record_every = stride_for(c.hydro_record_interval, sc.dt, "hydro-limit");
    const auto s0 = solver::make_initial_state(ops, eps, initial_of(c));
    if (i == 0) {
      // The macro initial data does not depend on eps; the fluid starts from it.
      const auto m0 = solver::macro_fields(ops.vgrid, s0.f);
      nsfp::FluidConfig fc;
      fc.dt = c.hydro_fluid_dt;
      fc.t_end = c.t_end;
      fc.record_every = stride_for(c.hydro_record_interval, fc.dt, "hydro-limit");
      fluid = nsfp::nsfp_run(ops.sgrid, nsfp::make_fluid_state(ops.sgrid, m0.a, m0.b, m0.c), coeffs, fc);
    }
    ctx.log << "kinetic run eps " << eps << ", " << sc.steps() << " steps\n";
    runs.push_back(solver::run_scenario(s0, sc, ops));
  }
  const auto table = diagnostics::hydro_limit_error(runs, fluid, ops);

  Json ledgers = Json::array();
  for (const auto& run : runs) {
    const auto led = solver::conservation_report(run, ops);
    ledgers.push_back({{"eps", run.eps},
                       {"mass_drift_rate", led.mass_drift_rate},
                       {"momentum_drift_rel", led.momentum_drift_rel},
                       {"energy_drift_rel", led.energy_drift_rel},
                       {"max_poisson_residual", run.max_poisson_residual},
                       {"max_neutrality", run.max_neutrality}});
  }

  Json rows = Json::array();
  for (const auto& row : table.rows) {
    TimeSeries ts;
    ts.labels = {"t", "rho", "u", "theta", "grad_phi"};
    for (std::size_t i = 0; i < row.times.size(); ++i)
      ts.add_row({row.times[i], row.per_time[i][0], row.per_time[i][1], row.per_time[i][2], row.per_time[i][3]});
    ctx.art.write_csv("hydro_" + eps_tag(row.eps) + ".csv", ts);
    rows.push_back({{"eps", row.eps},
                    {"rho", row.rho},
                    {"u", row.u},
                    {"theta", row.theta},
                    {"grad_phi", row.grad_phi},
                    {"total", row.total}});
  }
  Json r;
  r["lambda"] = coeffs.lambda;
  r["kappa"] = coeffs.kappa;
  r["rows"] = rows;
  r["conservation"] = ledgers;
  r["order"] = table.order;
  r["strictly_decreasing"] = table.strictly_decreasing;
  r["fluid_max_constraint_residual"] = fluid.max_constraint_residual;
  gate(ctx, table.strictly_decreasing, "errors not strictly decreasing in eps");
  gate(ctx, table.order >= 0.8, "fitted order " + format_double(table.order) + " below 0.8");
  r["gate_passed"] = ctx.gate_message.empty();
  ctx.art.write_json("report.json", r);
}

void cmd_characteristics(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto sg = solver::SpatialGrid::make(c.space_count, c.space_length, c.space_dim);
  const double k1 = 2.0 * kPi / c.space_length;
  Vector phi(static_cast<Eigen::Index>(sg.cells()));
  for (std::size_t i = 0; i < sg.cells(); ++i)
    phi[static_cast<Eigen::Index>(i)] = c.char_field / (k1 * k1) * std::cos(k1 * sg.position(i).x());
  const auto field = diagnostics::PotentialHistory::frozen(sg, phi);
  const auto none = diagnostics::PotentialHistory::frozen(sg, Vector::Zero(phi.size()));
  const Vec3 x(c.char_x[0], c.char_x[1], c.char_x[2]);
  const Vec3 v(c.char_v[0], c.char_v[1], c.char_v[2]);

  Json rows = Json::array();
  for (double eps : c.eps_list) {
    const double t = c.char_t_scale * std::sqrt(eps);
    const auto path = diagnostics::trace_characteristics(field, eps, t, x, v, c.char_steps);
    const auto free = diagnostics::trace_characteristics(none, eps, t, x, v, c.char_steps);
    double free_err = 0.0;
    TimeSeries ts;
    ts.labels = {"t", "X_1", "X_2", "X_3", "V_1", "V_2", "V_3", "jac_det", "free_det"};
    for (std::size_t i = 0; i < path.taus.size(); ++i) {
      const double exact = std::pow(std::abs(t - path.taus[i]), 3) / std::pow(eps, 3);
      if (exact > 0.0) free_err = std::max(free_err, std::abs(free.jac_det[i] - exact) / exact);
      ts.add_row({path.taus[i], path.X[i].x(), path.X[i].y(), path.X[i].z(), path.V[i].x(), path.V[i].y(),
                  path.V[i].z(), path.jac_det[i], free.jac_det[i]});
    }
    ctx.art.write_csv("characteristics_" + eps_tag(eps) + ".csv", ts);
    const double margin = diagnostics::jacobian_bracket_margin(path, eps);
    rows.push_back({{"eps", eps}, {"t", t}, {"bracket_margin", margin}, {"free_streaming_rel_error", free_err}});
    gate(ctx, margin <= 1.0, "bracket violated at eps " + format_double(eps));
    gate(ctx, free_err <= 1e-10, "free-streaming determinant off at eps " + format_double(eps));
  }
  Json r;
  r["max_hessian"] = field.max_hessian();
  r["rows"] = rows;
  r["gate_passed"] = ctx.gate_message.empty();
  ctx.art.write_json("report.json", r);
}

void cmd_nu_tilde_check(Context& ctx) {
  const auto& c = ctx.cfg;
  const auto model = model_of(c);
  if (model.hard()) throw PreconditionError("nu-tilde-check needs a soft potential (gamma < 0)");
  const auto vg = kinetic::build_velocity_grid(c.velocity_count, c.velocity_radius);
  const auto ang = angular_of(c);
  const auto field = diagnostics::decaying_field_bound(c.nu_tilde_delta);
  const auto coarse = diagnostics::NuTildeSamples::default_set(c.nu_tilde_refine);
  const auto fine = diagnostics::NuTildeSamples::default_set(2 * c.nu_tilde_refine);

  TimeSeries ts;
  ts.labels = {"t", "eps", "min_ratio", "min_ratio_refined", "relative_change", "worst_speed"};
  Json rows = Json::array();
  double varrho = 0.0;
  for (double eps : c.eps_list) {
    const auto a = diagnostics::nu_tilde_bound_check(c.weights, model, vg, ang, eps, field, coarse);
    const auto b = diagnostics::nu_tilde_bound_check(c.weights, model, vg, ang, eps, field, fine);
    const double change = std::abs(b.min_ratio - a.min_ratio) / std::abs(a.min_ratio);
    varrho = a.varrho;
    ts.add_row({a.worst_t, eps, a.min_ratio, b.min_ratio, change, a.worst_v.norm()});
    rows.push_back({{"eps", eps}, {"min_ratio", a.min_ratio}, {"min_ratio_refined", b.min_ratio},
                    {"relative_change", change}, {"worst_t", a.worst_t}, {"worst_speed", a.worst_v.norm()}});
    gate(ctx, a.min_ratio > 0.0 && b.min_ratio > 0.0, "ratio not positive at eps " + format_double(eps));
    gate(ctx, change < 0.05, "sample doubling changes the minimum by >= 5% at eps " + format_double(eps));
  }
  ctx.art.write_csv("nu_tilde.csv", ts);
  Json r;
  r["gamma"] = c.gamma;
  r["sigma"] = c.weights.sigma_exp;
  r["varrho"] = varrho;
  r["delta"] = c.nu_tilde_delta;
  r["rows"] = rows;
  r["gate_passed"] = ctx.gate_message.empty();
  ctx.art.write_json("report.json", r);
}

const std::map<std::string, std::function<void(Context&)>>& registry() {
  static const std::map<std::string, std::function<void(Context&)>> m{
      {"operator-audit", cmd_operator_audit},   {"linear-decay", cmd_linear_decay},
      {"nonlinear-run", cmd_nonlinear_run},     {"nsfp-run", cmd_nsfp_run},
      {"hydro-limit", cmd_hydro_limit},         {"characteristics", cmd_characteristics},
      {"nu-tilde-check", cmd_nu_tilde_check},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"operator-audit", "linear-decay",   "nonlinear-run", "nsfp-run",
                                              "hydro-limit",    "characteristics", "nu-tilde-check"};
  return names;
}

int run_subcommand(const std::string& name, const ScenarioConfig& config, std::ostream& log) {
  RunArtifacts art(config.output_dir, name, config);
  int code = kExitOk;
  std::string kind, message;
  try {
    const auto it = registry().find(name);
    if (it == registry().end()) throw PreconditionError("unknown subcommand '" + name + "'");
    Context ctx{config, art, log, {}};
    it->second(ctx);
    if (!ctx.gate_message.empty()) {
      code = kExitGate;
      kind = "gate";
      message = ctx.gate_message;
    }
  } catch (const PreconditionError& e) {
    code = kExitConfig;
    kind = "config";
    message = e.what();
  } catch (const NumericError& e) {
    code = kExitNumeric;
    kind = "numeric";
    message = e.what();
    if (e.step() >= 0) message += " (step " + std::to_string(e.step()) + ")";
  } catch (const std::exception& e) {
    code = kExitFailure;
    kind = "error";
    message = e.what();
  }
  if (code != kExitOk) {
    log << name << " failed [" << kind << "]: " << message << "\n";
    art.write_failure(code, kind, message);
  }
  art.finalize(code);
  return code;
}

}  // namespace vpb::io
