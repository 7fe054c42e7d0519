#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vpb/diagnostics/characteristics.hpp"
#include "vpb/diagnostics/derivatives.hpp"
#include "vpb/diagnostics/energy.hpp"
#include "vpb/diagnostics/hydro_limit.hpp"
#include "vpb/diagnostics/macro_balance.hpp"
#include "vpb/diagnostics/nu_tilde.hpp"
#include "vpb/diagnostics/sup_norm.hpp"
#include "vpb/kinetic/collision.hpp"
#include "vpb/solver/fourier.hpp"
#include "vpb/spectral/decay.hpp"

#include <cmath>
#include <random>

using namespace vpb;
using namespace vpb::diagnostics;
using solver::KineticState;
using solver::SolverOperators;

namespace {

const kinetic::VelocityGrid& vgrid() {
  static const auto g = kinetic::build_velocity_grid(12, 6.0);
  return g;
}

SolverOperators make_ops(double gamma, int nx = 16) {
  return solver::make_solver_operators(solver::SpatialGrid::make(nx, 2 * kPi, 1), vgrid(), solver::CollisionMode::bgk,
                                       1.0, kinetic::PotentialModel::make(gamma), kinetic::make_angular_quadrature());
}
const SolverOperators& hard_ops() {
  static const SolverOperators ops = make_ops(1.0);
  return ops;
}
const SolverOperators& soft_ops() {
  static const SolverOperators ops = make_ops(-2.0);
  return ops;
}

KineticState sin_state(const SolverOperators& ops) {
  KineticState s;
  s.eps = 0.5;
  const auto n = static_cast<Eigen::Index>(ops.sgrid.cells());
  s.f.resize(static_cast<Eigen::Index>(ops.vgrid.size()), n);
  for (Eigen::Index c = 0; c < n; ++c) s.f.col(c) = std::sin(ops.sgrid.position(std::size_t(c)).x()) * ops.vgrid.sqrt_mu;
  solver::refresh_potential(s, ops);
  return s;
}

KineticState random_state(const SolverOperators& ops, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  KineticState s;
  s.eps = 0.5;
  s.time = 0.3;
  s.f.resize(static_cast<Eigen::Index>(ops.vgrid.size()), static_cast<Eigen::Index>(ops.sgrid.cells()));
  for (Eigen::Index c = 0; c < s.f.cols(); ++c)
    for (Eigen::Index i = 0; i < s.f.rows(); ++i) s.f(i, c) = nd(rng) * ops.vgrid.sqrt_mu[i];
  const Vector a = solver::density(ops.vgrid, s.f);
  s.f -= (solver::spatial_mean(a) / ops.vgrid.quad_weights.dot(ops.vgrid.mu)) * ops.vgrid.sqrt_mu *
         Vector::Ones(s.f.cols()).transpose();
  solver::refresh_potential(s, ops);
  return s;
}

KineticState scaled(KineticState s, double lam) {
  s.f *= lam;
  s.phi *= lam;
  return s;
}

std::vector<double> all_fields(const EnergyReport& r) {
  std::vector<double> out{r.E_hard, r.Etilde_hard, r.E_soft_ell, r.D_hard, r.D_soft_ell};
  for (const auto& [k, v] : r.components) out.push_back(v);
  return out;
}

solver::RecordedRun bgk_run(const SolverOperators& ops, double eps, double t_end, double dt, int every,
                            const std::string& preset = "random_macro") {
  const auto s0 = solver::make_initial_state(ops, eps, {preset, 0.05, 3});
  solver::SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.record_every = every;
  return solver::run_scenario(s0, c, ops);
}

}  // namespace

TEST_CASE("energy_hard") {
  const auto& ops = hard_ops();
  const auto& vg = ops.vgrid;
  SUBCASE("zero state") {
    KineticState s = scaled(sin_state(ops), 0.0);
    for (double v : all_fields(energy_hard(s, ops))) CHECK(v == 0.0);
  }
  SUBCASE("sqrt(mu) sin(x1): closed-form x-norms") {
    const KineticState s = sin_state(ops);
    const double mass = vg.quad_weights.dot(vg.mu);  // discrete int mu dv
    // L^2 of sin and cos over [0, 2 pi) is pi.
    CHECK(sq_norm(ops.sgrid, vg, s.f) == doctest::Approx(kPi * mass).epsilon(1e-8));
    CHECK(sq_norm(ops.sgrid, vg, x_derivative(ops.sgrid, s.f, {1, 0, 0})) == doctest::Approx(kPi * mass).epsilon(1e-8));
    // phi = mass sin x: grad phi, its first and second derivatives each carry pi mass^2.
    const auto r = energy_hard(s, ops);
    CHECK(r.component("grad_phi_H2") == doctest::Approx(3 * kPi * mass * mass).epsilon(1e-8));
    // w = <v>: ||w f||^2_{H^1_x L^2_v} = 2 pi sum w (1 + |v|^2) mu.
    double m2 = 0.0;
    for (std::size_t i = 0; i < vg.size(); ++i)
      m2 += vg.quad_weights[Eigen::Index(i)] * (1 + vg.nodes[i].squaredNorm()) * vg.mu[Eigen::Index(i)];
    CHECK(r.component("w_f_H1L2") == doctest::Approx(2 * kPi * m2).epsilon(1e-8));
    // Pure macro: no micro components.
    CHECK(r.component("micro_H2") <= tol::moment * r.component("f_H2"));
    CHECK(r.component("w_micro_H1L2") <= tol::moment * r.component("f_H2"));
  }
  SUBCASE("the weight never decreases the norm (w >= 1)") {
    const KineticState s = random_state(ops, 2);
    const auto r = energy_hard(s, ops);
    const double unweighted = sq_norm(ops.sgrid, vg, s.f) + sq_norm(ops.sgrid, vg, x_derivative(ops.sgrid, s.f, {1, 0, 0}));
    CHECK(r.component("w_f_H1L2") >= unweighted);
  }
  SUBCASE("homogeneous of degree 2") {
    const KineticState s = random_state(ops, 3);
    const auto a = all_fields(energy_hard(s, ops));
    const auto b = all_fields(energy_hard(scaled(s, 2.0), ops));
    const auto c = all_fields(energy_hard(scaled(s, 3.0), ops));
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(b[i] == 4.0 * a[i]);
      CHECK(c[i] == doctest::Approx(9.0 * a[i]).epsilon(1e-13));
      CHECK(std::isfinite(a[i]));
      CHECK(a[i] >= 0.0);
    }
  }
  SUBCASE("soft model rejected") { CHECK_THROWS_AS(energy_hard(sin_state(soft_ops()), soft_ops()), PreconditionError); }
}

TEST_CASE("energy_soft and dissipation_soft") {
  const auto& ops = soft_ops();
  kinetic::WeightSpec spec;
  spec.ell = 1.0;
  SUBCASE("zero state") {
    const KineticState s = scaled(sin_state(ops), 0.0);
    for (double v : all_fields(energy_soft(s, ops, spec))) CHECK(v == 0.0);
    for (double v : all_fields(dissipation_soft(s, ops, spec))) CHECK(v == 0.0);
  }
  SUBCASE("pure macro data has no micro dissipation") {
    const KineticState s = sin_state(ops);
    const auto d = dissipation_soft(s, ops, spec);
    const double scale = energy_soft(s, ops, spec).E_soft_ell;
    CHECK(d.component("w_beta_micro_nu") <= tol::moment * scale);
    CHECK(d.component("w_beta_minus_ell_micro_nu") <= tol::moment * scale);
    CHECK(d.component("w_minus_ell_dxx_micro_nu") <= tol::moment * scale);
    CHECK(d.component("grad_Pf_H1") > 0.0);
  }
  SUBCASE("ell = 0 reduces the beta = 0 weights to 1") {
    spec.ell = 0.0;
    const KineticState s = random_state(ops, 4);
    const auto r = energy_soft(s, ops, spec);
    const double dxx = sq_norm(ops.sgrid, vgrid(), x_derivative(ops.sgrid, s.f, {2, 0, 0}));
    CHECK(r.component("w_minus_ell_dxx_f") == doctest::Approx(dxx).epsilon(1e-12));
    // |beta| = 0, |alpha| <= 1 part of the ell-shifted norm is the plain H^1_x L^2_v norm; the
    // rest carries w^{2|beta|} exactly like the unshifted term restricted to |alpha| <= 1.
    double low = 0.0;
    for (const auto& mi : multi_indices(2, 1)) {
      if (mi.x_order() > 1) continue;
      Vector w(static_cast<Eigen::Index>(vgrid().size()));
      for (std::size_t i = 0; i < vgrid().size(); ++i)
        w[Eigen::Index(i)] = std::pow(kinetic::weight_w(ops.model, vgrid().nodes[i]), 2.0 * mi.v_order());
      low += weighted_sq_norm(ops.sgrid, vgrid(), v_derivative(vgrid(), x_derivative(ops.sgrid, s.f, mi.alpha), mi.beta), w);
    }
    CHECK(r.component("w_beta_minus_ell_f") == doctest::Approx(low).epsilon(1e-12));
  }
  SUBCASE("homogeneous of degree 2") {
    const KineticState s = random_state(ops, 5);
    for (const auto& [fa, fb] : {std::pair{all_fields(energy_soft(s, ops, spec)), all_fields(energy_soft(scaled(s, 2.0), ops, spec))},
                                 std::pair{all_fields(dissipation_soft(s, ops, spec)),
                                           all_fields(dissipation_soft(scaled(s, 2.0), ops, spec))}}) {
      for (std::size_t i = 0; i < fa.size(); ++i) {
        CHECK(fb[i] == 4.0 * fa[i]);
        CHECK(fa[i] >= 0.0);
      }
    }
  }
  SUBCASE("hard model rejected") {
    CHECK_THROWS_AS(energy_soft(sin_state(hard_ops()), hard_ops(), spec), PreconditionError);
  }
}

TEST_CASE("weighted_sup_norm") {
  const auto& ops = hard_ops();
  const auto& vg = ops.vgrid;
  kinetic::WeightSpec spec;
  spec.vartheta = 0.01;
  KineticState s;
  s.eps = 1.0;
  s.f = vg.sqrt_mu * Vector::Ones(static_cast<Eigen::Index>(ops.sgrid.cells())).transpose();
  SUBCASE("zero") {
    KineticState z = scaled(s, 0.0);
    for (int m = 0; m <= 2; ++m) CHECK(weighted_sup_norm(z, ops, spec, m) == 0.0);
  }
  SUBCASE("sqrt(mu) at t = 0: maximum at the node nearest v = 0") {
    // w sqrt(mu) = (2 pi)^{-3/4} exp((2 vartheta - 1/4)|v|^2), decreasing in |v|.
    const double r2 = 3.0 * std::pow(0.5 * vg.spacing, 2);
    const double want = std::pow(2 * kPi, -0.75) * std::exp((2 * spec.vartheta - 0.25) * r2);
    CHECK(weighted_sup_norm(s, ops, spec, 0) == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("monotone in the order and homogeneous of degree 1") {
    const KineticState r = random_state(ops, 6);
    const double m0 = weighted_sup_norm(r, ops, spec, 0), m1 = weighted_sup_norm(r, ops, spec, 1),
                 m2 = weighted_sup_norm(r, ops, spec, 2);
    CHECK(m1 >= m0);
    CHECK(m2 >= m1);
    CHECK(weighted_sup_norm(scaled(r, 2.0), ops, spec, 2) == 2.0 * m2);
  }
  SUBCASE("bad order") { CHECK_THROWS_AS(weighted_sup_norm(s, ops, spec, 3), PreconditionError); }
}

TEST_CASE("nu_tilde") {
  kinetic::WeightSpec spec;
  spec.sigma_exp = 1.0 / 24.0;
  SUBCASE("reduces to nu at v = 0 without a field") {
    CHECK(nu_tilde(spec, 3.7, 0.5, 0.0, Vec3::Zero(), Vec3::Zero()) == 3.7);
    CHECK(nu_tilde(spec, 3.7, 0.5, 2.0, Vec3::Zero(), Vec3(1, 2, 3)) == 3.7);
  }
  SUBCASE("reduces to nu with grad phi = 0 and vartheta sigma -> 0") {
    kinetic::WeightSpec tiny = spec;
    tiny.vartheta = 1e-300;
    CHECK(nu_tilde(tiny, 2.5, 0.7, 1.0, Vec3(3, 1, 0), Vec3::Zero()) == 2.5);
  }
  SUBCASE("closed form of the additive terms") {
    const Vec3 v(1, 2, 0), g(0.5, -1, 2);
    const double t = 1.5, eps = 0.4;
    const double th = spec.vartheta * (1 + std::pow(1 + t, -spec.sigma_exp));
    const double want = 1.0 + eps * eps * ((0.5 + 2 * th) * v.dot(g) +
                                           spec.vartheta * spec.sigma_exp * v.squaredNorm() / std::pow(1 + t, 1 + spec.sigma_exp));
    CHECK(nu_tilde(spec, 1.0, eps, t, v, g) == doctest::Approx(want).epsilon(1e-15));
  }
  SUBCASE("varrho for gamma = -1, sigma = 1/24 is 47/72") {
    const double r = varrho(spec, kinetic::PotentialModel::make(-1.0));
    CHECK(r == doctest::Approx(47.0 / 72.0).epsilon(1e-15));
    CHECK(r > 3.0 / 8.0);
    CHECK(r < 1.0);
  }
  SUBCASE("bound check positive and refinement-stable for gamma = -2") {
    const auto g = kinetic::build_velocity_grid(12, 6.0);
    const auto ang = kinetic::make_angular_quadrature();
    const auto model = kinetic::PotentialModel::make(-2.0);
    for (double eps : {1.0, 0.5}) {
      const auto c1 = nu_tilde_bound_check(spec, model, g, ang, eps, decaying_field_bound(1e-2), NuTildeSamples::default_set(1));
      const auto c2 = nu_tilde_bound_check(spec, model, g, ang, eps, decaying_field_bound(1e-2), NuTildeSamples::default_set(2));
      CHECK(c1.min_ratio > 0.0);
      CHECK(c2.min_ratio <= c1.min_ratio);  // nested samples
      CHECK(std::abs(c2.min_ratio - c1.min_ratio) < 0.05 * c1.min_ratio);
    }
  }
  SUBCASE("nested sample sets") {
    const auto a = NuTildeSamples::default_set(1), b = NuTildeSamples::default_set(2);
    for (std::size_t j = 0; j < a.times.size(); ++j) CHECK(a.times[j] == doctest::Approx(b.times[2 * j]).epsilon(1e-14));
    CHECK_THROWS_AS(NuTildeSamples::default_set(0), PreconditionError);
  }
}

TEST_CASE("characteristics") {
  const auto sg = solver::SpatialGrid::make(32, 2 * kPi, 1);
  SUBCASE("free streaming: straight lines and |det| = |t - tau|^3 / eps^3") {
    const auto hist = PotentialHistory::frozen(sg, Vector::Zero(32));
    for (double eps : {1.0, 0.5, 0.25}) {
      const double t = 0.7;
      const Vec3 x(1.0, 2.0, 3.0), v(0.4, -1.3, 2.2);
      const auto path = trace_characteristics(hist, eps, t, x, v, 40);
      REQUIRE(path.taus.size() == 41);
      CHECK(path.taus.front() == t);
      CHECK(path.taus.back() == 0.0);
      CHECK((path.X.front() - x).norm() == 0.0);
      CHECK((path.V.front() - v).norm() == 0.0);
      for (std::size_t n = 0; n < path.taus.size(); ++n) {
        const double dt = t - path.taus[n];
        const Vec3 want = x - v * dt / eps;
        for (int i = 0; i < 3; ++i) {
          // Periodic distance: the tracer wraps every coordinate into [0, L).
          const double d = std::remainder(path.X[n][i] - want[i], sg.box_length);
          CHECK(std::abs(d) < 1e-12);
          CHECK(path.X[n][i] >= 0.0);
          CHECK(path.X[n][i] < sg.box_length);
        }
        CHECK((path.V[n] - v).norm() < 1e-14);
        CHECK(std::abs(path.jac_det[n] - std::pow(dt / eps, 3)) <= 1e-12 * std::max(1.0, std::pow(dt / eps, 3)));
      }
      CHECK(jacobian_bracket_margin(path, eps) <= 1.0);
    }
  }
  SUBCASE("small frozen field keeps the bracket for t <= 0.1 eps^{1/2}") {
    Vector phi(32);
    for (Eigen::Index c = 0; c < 32; ++c) phi[c] = 1e-2 * std::cos(sg.position(std::size_t(c)).x());
    const auto hist = PotentialHistory::frozen(sg, phi);
    CHECK(hist.max_hessian() <= 1e-2 * (1 + 1e-12));
    for (double eps : {1.0, 0.5, 0.25}) {
      const auto path = trace_characteristics(hist, eps, 0.1 * std::sqrt(eps), Vec3(0.3, 0, 0), Vec3(1, 0.5, 0), 50);
      CHECK(jacobian_bracket_margin(path, eps) <= 1.0);
    }
  }
  SUBCASE("preconditions") {
    const auto hist = PotentialHistory::frozen(sg, Vector::Zero(32));
    CHECK_THROWS_AS(trace_characteristics(hist, 0.0, 1.0, Vec3::Zero(), Vec3::Zero(), 4), PreconditionError);
    CHECK_THROWS_AS(trace_characteristics(hist, 1.0, 1.0, Vec3::Zero(), Vec3::Zero(), 0), PreconditionError);
    CHECK_THROWS_AS(PotentialHistory(sg, {0.0, 0.0}, {Vector::Zero(32), Vector::Zero(32)}), PreconditionError);
  }
}

TEST_CASE("macro_balance_residual") {
  const auto& ops = hard_ops();
  SUBCASE("static zero run") {
    const auto run = bgk_run(ops, 0.5, 0.5, 0.05, 1, "zero");
    const auto res = macro_balance_residual(run, ops);
    for (double v : res.mass) CHECK(v == 0.0);
    for (double v : res.momentum) CHECK(v == 0.0);
    for (double v : res.energy) CHECK(v == 0.0);
  }
  SUBCASE("transport-only mass residual is O(stride^2)") {
    std::vector<double> worst;
    for (double dt : {0.02, 0.01}) {
      const auto s0 = solver::make_initial_state(ops, 0.5, {"random_macro", 0.05, 3});
      solver::SolverConfig c;
      c.dt = dt;
      c.t_end = 0.4;
      c.field_on = false;
      c.collision_on = false;
      const auto res = macro_balance_residual(solver::run_scenario(s0, c, ops), ops);
      worst.push_back(*std::max_element(res.mass.begin(), res.mass.end()));
    }
    CAPTURE(worst[0]);
    CAPTURE(worst[1]);
    CHECK(worst[0] / worst[1] == doctest::Approx(4.0).epsilon(0.2));
  }
  SUBCASE("BGK small-data residuals drop about 4x when the stride halves") {
    std::vector<BalanceResiduals> res;
    for (int every : {4, 2})
      res.push_back(macro_balance_residual(bgk_run(ops, 0.5, 0.8, 0.0025, every), ops));
    auto peak = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
    for (auto field : {&BalanceResiduals::mass, &BalanceResiduals::momentum, &BalanceResiduals::energy}) {
      const double ratio = peak(res[0].*field) / peak(res[1].*field);
      CAPTURE(ratio);
      CHECK(ratio >= 3.0);
      CHECK(ratio <= 5.0);
    }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(macro_balance_residual(bgk_run(ops, 0.5, 0.05, 0.05, 1), ops), PreconditionError);
  }
}

TEST_CASE("micro_part_smallness") {
  const auto& ops = hard_ops();
  SUBCASE("macro-only data with transport off stays macro") {
    const auto s0 = solver::make_initial_state(ops, 0.5, {"macro_wave", 0.05, 1});
    solver::SolverConfig c;
    c.dt = 0.025;
    c.t_end = 0.5;
    c.transport_on = false;
    c.field_on = false;
    c.gamma_on = false;
    const auto [eps, integral] = micro_part_smallness(solver::run_scenario(s0, c, ops), ops);
    CHECK(eps == 0.5);
    CHECK(integral <= 1e-28);
  }
  SUBCASE("eps halving: ratio in [3, 5]") {
    const double i1 = micro_part_smallness(bgk_run(ops, 0.5, 2.0, 0.025, 1), ops).second;
    const double i2 = micro_part_smallness(bgk_run(ops, 0.25, 2.0, 0.00625, 1), ops).second;
    CAPTURE(i1 / i2);
    CHECK(i1 / i2 >= 3.0);
    CHECK(i1 / i2 <= 5.0);
  }
  SUBCASE("stable under record-stride halving within 2%") {
    const double a = micro_part_smallness(bgk_run(ops, 0.5, 2.0, 0.025, 2), ops).second;
    const double b = micro_part_smallness(bgk_run(ops, 0.5, 2.0, 0.025, 1), ops).second;
    CHECK(std::isfinite(a));
    CHECK(std::abs(a - b) <= 0.02 * b);
  }
}

TEST_CASE("hydro_limit_error") {
  const auto& ops = hard_ops();
  const auto r1 = bgk_run(ops, 0.5, 0.5, 0.025, 4);
  const auto r2 = bgk_run(ops, 0.25, 0.5, 0.00625, 16);
  SUBCASE("self-comparison is exactly zero") {
    const auto t = hydro_limit_error({r1}, fluid_view(r1, ops), ops);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].total == 0.0);
  }
  SUBCASE("symmetric under relabeling of the eps list") {
    const auto fluid = fluid_view(r2, ops);
    const auto a = hydro_limit_error({r1, r2}, fluid, ops);
    const auto b = hydro_limit_error({r2, r1}, fluid, ops);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0].eps == 0.5);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(a.rows[i].eps == b.rows[i].eps);
      CHECK(a.rows[i].total == b.rows[i].total);
    }
    CHECK(a.order == b.order);
    CHECK(a.rows[1].total == 0.0);
    CHECK(a.rows[0].total > 0.0);
  }
  SUBCASE("mismatched records are refused") {
    const auto other = bgk_run(ops, 0.5, 0.5, 0.025, 5);
    CHECK_THROWS_AS(hydro_limit_error({other}, fluid_view(r1, ops), ops), PreconditionError);
    const auto coarse = make_ops(1.0, 8);
    CHECK_THROWS_AS(hydro_limit_error({r1}, fluid_view(bgk_run(coarse, 0.5, 0.5, 0.025, 4), coarse), ops),
                    PreconditionError);
  }
}

TEST_CASE("decay fit recovers exact power laws") {
  spectral::DecaySeries s;
  s.label = "l2";
  for (double t = 0.0; t <= 400.0; t += 2.0) {
    s.times.push_back(t);
    s.values.push_back(3.0 * std::pow(1.0 + t, -1.75));
  }
  const auto fit = spectral::fit_decay_exponent(s, {20.0, 300.0});
  CHECK(std::abs(fit.exponent + 1.75) <= 1e-6);
  CHECK(fit.residual >= 0.0);
  CHECK(fit.residual < 1e-10);
}
