// Acceptance run: one PASS/FAIL line per criterion on stdout, progress on stderr.
// Exit status is the number of failed criteria (capped at 1 for ctest).

#include "vpb/diagnostics/macro_balance.hpp"
#include "vpb/io/commands.hpp"
#include "vpb/io/config.hpp"
#include "vpb/io/manifest.hpp"
#include "vpb/kinetic/angular_quadrature.hpp"
#include "vpb/kinetic/collision.hpp"
#include "vpb/kinetic/linearized_operator.hpp"
#include "vpb/nsfp/fluid.hpp"
#include "vpb/nsfp/transport_coefficients.hpp"
#include "vpb/solver/scenario.hpp"
#include "vpb/spectral/mode_evolution.hpp"
#include "vpb/spectral/whole_space.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace vpb;
namespace fs = std::filesystem;
using io::Json;

namespace {

const fs::path kOut = fs::current_path() / "acceptance-out";
const fs::path kConfigs = fs::path(VPB_SOURCE_DIR) / "tools" / "configs";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::ScenarioConfig config(const std::string& file, const std::string& out) {
  auto c = io::parse_config((kConfigs / file).string());
  c.output_dir = (kOut / out).string();
  return c;
}

// In-process subcommand run; returns (exit code, report.json).
std::pair<int, Json> run(const std::string& sub, const io::ScenarioConfig& c) {
  const int code = io::run_subcommand(sub, c, std::cerr);
  const fs::path rep = fs::path(c.output_dir) / "report.json";
  return {code, fs::exists(rep) ? Json::parse(slurp(rep)) : Json{}};
}

// Collected by criteria 5 and 6 for the conservation ledger of criterion 11.
struct LedgerEntry {
  std::string label;
  double mass_rate, neutrality, poisson;
};
std::vector<LedgerEntry> g_ledgers;

// ---------------------------------------------------------------------------

Outcome c1_operator_audit() {
  const auto [code, r] = run("operator-audit", config("audit.ini", "c1"));
  Outcome o;
  o.pass = code == 0 && r.value("gate_passed", false);
  o.detail = "kernel_dim=" + std::to_string(r.value("kernel_dimension", -1)) +
             " sym_defect=" + num(r.value("symmetry_defect", -1.0)) + " (tol " + num(r.value("symmetry_tolerance", 0.0)) +
             ") sigma0=" + num(r.value("sigma0_estimate", 0.0)) + " sigma0(N=20)=" + num(r.value("sigma0_refined", 0.0)) +
             " change=" + num(r.value("sigma0_relative_change", 1.0));
  return o;
}

Outcome c2_collision_invariants() {
  const auto g = kinetic::build_velocity_grid(12, 6.0);
  const auto ang = kinetic::make_angular_quadrature();
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  constexpr int kProfiles = 50, kRaw = 5;
  Matrix F(static_cast<Eigen::Index>(g.size()), kProfiles);
  for (int p = 0; p < kProfiles; ++p) {
    // Smooth random profiles: cubic polynomial in v times sqrt(mu).
    double c[10];
    for (double& x : c) x = nd(rng);
    F.col(p) = g.sample([&](const Vec3& v) {
                  return c[0] + c[1] * v.x() + c[2] * v.y() + c[3] * v.z() + c[4] * v.x() * v.y() +
                         c[5] * (v.z() * v.z() - 1) + c[6] * v.x() * v.y() * v.z() + c[7] * v.x() * v.x() * v.y() +
                         c[8] * v.squaredNorm() * v.z() / 3 + c[9] * v.y() * v.z();
                })
                   .cwiseProduct(g.sqrt_mu);
  }
  // {1, v, |v|^2} sqrt(mu) moments by direct summation.
  Matrix T(5, static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Vec3& v = g.nodes[i];
    const double w = g.quad_weights[ii] * g.sqrt_mu[ii];
    T.col(ii) << w, w * v.x(), w * v.y(), w * v.z(), w * v.squaredNorm();
  }
  Outcome o{true, ""};
  double worst = 0.0, worst_raw = 0.0;
  for (double gamma : {1.0, 0.0, -1.0, -2.0, -2.5}) {
    std::cerr << "criterion 2: gamma " << gamma << "\n";
    const auto m = kinetic::PotentialModel::make(gamma);
    const Matrix G = kinetic::gamma_bilinear_batch(m, g, ang, F, F);
    kinetic::GammaOptions raw;
    raw.conservative = false;
    const Matrix Fr = F.leftCols(kRaw);
    const Matrix Gr = kinetic::gamma_bilinear_batch(m, g, ang, Fr, Fr, raw);
    for (int p = 0; p < kProfiles; ++p) {
      const double f2 = g.dot(F.col(p), F.col(p));
      const double d = (T * G.col(p)).cwiseAbs().maxCoeff() / f2;
      worst = std::max(worst, d);
      if (p < kRaw) worst_raw = std::max(worst_raw, (T * Gr.col(p)).cwiseAbs().maxCoeff() / f2);
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = "max |moment|/||f||^2=" + num(worst) + " over 50 profiles x 5 gamma (tol 1e-06); raw strong-form defect " +
             "before the conservative correction=" + num(worst_raw) + " (5 profiles)";
  return o;
}

Outcome c3_linear_decay() {
  const auto [code, r] = run("linear-decay", config("linear_decay.ini", "c3"));
  Outcome o;
  if (code != 0) return {false, "linear-decay exited " + std::to_string(code)};
  const double l2 = r["fits"]["l2"]["exponent"], gx = r["fits"]["grad_x"]["exponent"],
               gp = r["fits"]["grad_phi"]["exponent"];
  o.pass = l2 >= -0.9 && l2 <= -0.6 && gx >= -1.45 && gx <= -1.05 && gp <= -1.0;
  o.detail = "L2 exponent=" + num(l2) + " in [-0.9,-0.6]; grad_x=" + num(gx) + " in [-1.45,-1.05]; grad_phi=" + num(gp) +
             " <= -1.0 (preset " + r["preset"].get<std::string>() + ")";
  return o;
}

Outcome c4_mode_energy() {
  const auto g = kinetic::build_velocity_grid(16, 8.0);
  kinetic::AssemblyOptions ao;
  ao.estimate_gap = false;
  const auto op = kinetic::assemble_linearized(kinetic::PotentialModel::make(1.0), g, kinetic::make_angular_quadrature(), ao);
  const auto basis = spectral::ModeBasis::axial(g);
  const Matrix L = basis.restrict_operator(op.L);
  const auto kg = spectral::log_k_grid(1e-3, 8.0, 200);
  std::vector<double> tg;
  for (int n = 0; n <= 40; ++n) tg.push_back(0.5 * n);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  int violations = 0;
  double worst = -1.0;
  spectral::EvolveOptions eo;
  eo.check_monotone = false;
  for (double k : kg.nodes) {
    const auto mop = spectral::assemble_mode_operator_reduced(L, basis, Vec3(k, 0, 0), 1.0, g);
    // Random axial data with a density component.
    CVector c0(basis.size());
    for (Eigen::Index i = 0; i < c0.size(); ++i) c0[i] = cplx(nd(rng), nd(rng)) * std::exp(-0.05 * double(i));
    c0 += mop.s.cast<cplx>() * cplx(nd(rng), nd(rng));
    const auto traj = spectral::evolve_mode(mop, c0, tg, eo);
    for (std::size_t n = 1; n < traj.size(); ++n) {
      const double e0 = mop.energy(traj[n - 1]), e1 = mop.energy(traj[n]);
      worst = std::max(worst, (e1 - e0) / e0);
      if (e1 > e0 * (1 + tol::mono)) ++violations;
    }
  }
  return {violations == 0, "200 modes x 40 steps, violations=" + std::to_string(violations) +
                               " max relative step increase=" + num(worst) + " (tol 1e-08)"};
}

Outcome c5_eps_squared() {
  auto c = config("nonlinear.ini", "c5");
  c.preset = "random_macro";
  c.t_end = 2.0;
  const auto ops = [&] {
    const auto sg = solver::SpatialGrid::make(c.space_count, c.space_length, c.space_dim);
    const auto vg = kinetic::build_velocity_grid(c.velocity_count, c.velocity_radius);
    return solver::make_solver_operators(sg, vg, solver::CollisionMode::bgk, c.nu0, kinetic::PotentialModel::make(c.gamma),
                                         kinetic::make_angular_quadrature());
  }();
  std::vector<double> I;
  for (double eps : {0.5, 0.25}) {
    std::cerr << "criterion 5: eps " << eps << "\n";
    solver::SolverConfig sc;
    sc.dt = c.time_step(eps);
    sc.t_end = c.t_end;
    sc.record_every = 1;
    const auto s0 = solver::make_initial_state(ops, eps, {c.preset, c.amplitude, c.seed});
    const auto r = solver::run_scenario(s0, sc, ops);
    I.push_back(diagnostics::micro_part_smallness(r, ops).second);
    const auto led = solver::conservation_report(r, ops);
    g_ledgers.push_back({"c5 eps " + num(eps), led.mass_drift_rate, r.max_neutrality, r.max_poisson_residual});
  }
  const double ratio = I[0] / I[1];
  return {ratio >= 3.0 && ratio <= 5.0, "int ||(I-P)f||^2: eps 0.5 -> " + num(I[0]) + ", eps 0.25 -> " + num(I[1]) +
                                            ", ratio=" + num(ratio) + " in [3,5]"};
}

Outcome c6_hydro_limit() {
  const auto [code, r] = run("hydro-limit", config("hydro.ini", "c6"));
  if (!r.contains("rows")) return {false, "hydro-limit exited " + std::to_string(code)};
  std::string totals;
  for (const auto& row : r["rows"]) totals += num(row["eps"]) + ":" + num(row["total"]) + " ";
  for (const auto& l : r["conservation"])
    g_ledgers.push_back({"c6 eps " + num(l["eps"]), l["mass_drift_rate"], l["max_neutrality"], l["max_poisson_residual"]});
  return {code == 0 && r["strictly_decreasing"].get<bool>() && r["order"].get<double>() >= 0.8,
          "sup-time L2 totals " + totals + "strictly_decreasing=" + (r["strictly_decreasing"].get<bool>() ? "yes" : "no") +
              " order=" + num(r["order"]) + " (>= 0.8)"};
}

Outcome c7_transport_coefficients() {
  Outcome o{true, ""};
  const auto g20 = kinetic::build_velocity_grid(20, 8.0);
  double bgk_err = 0.0;
  for (double nu0 : {1.0, 2.0}) {
    const auto tc = nsfp::compute_transport_coefficients(kinetic::make_bgk_operator(g20, nu0), g20);
    bgk_err = std::max({bgk_err, std::abs(tc.lambda - 1.0 / nu0), std::abs(tc.kappa - 1.0 / nu0)});
  }
  const auto model = kinetic::PotentialModel::make(1.0);
  const auto ang = kinetic::make_angular_quadrature();
  kinetic::AssemblyOptions ao;
  ao.estimate_gap = false;
  std::vector<nsfp::TransportCoefficients> hs;
  for (auto [n, R] : {std::pair{12, 6.0}, std::pair{16, 8.0}}) {
    const auto g = kinetic::build_velocity_grid(n, R);
    hs.push_back(nsfp::compute_transport_coefficients(kinetic::assemble_linearized(model, g, ang, ao), g));
  }
  const double dl = std::abs(hs[0].lambda - hs[1].lambda) / hs[1].lambda;
  const double dk = std::abs(hs[0].kappa - hs[1].kappa) / hs[1].kappa;
  o.pass = bgk_err <= 1e-8 && dl <= 0.1 && dk <= 0.1;
  o.detail = "BGK max|coef - 1/nu0|=" + num(bgk_err) + " on (20,8) (tol 1e-08); hard sphere (12,6)->(16,8): lambda " +
             num(hs[0].lambda) + "->" + num(hs[1].lambda) + ", kappa " + num(hs[0].kappa) + "->" + num(hs[1].kappa) +
             " (rel change " + num(dl) + ", " + num(dk) + " <= 0.1)";
  return o;
}

Outcome c8_nsfp() {
  const auto g = solver::SpatialGrid::make(16, 2 * kPi, 3);
  const nsfp::TransportCoefficients tc{0.8, 1.1};
  const auto n = static_cast<Eigen::Index>(g.cells());
  const Vector zero = Vector::Zero(n);
  // Shear mode u = A sin(k x2) e1.
  const double A = 0.3, k = 2.0, T = 1.0;
  nsfp::VectorField u{zero, zero, zero};
  for (Eigen::Index c = 0; c < n; ++c) u[0][c] = A * std::sin(k * g.position(std::size_t(c)).y());
  nsfp::FluidConfig fc;
  fc.dt = 1e-3;
  fc.t_end = T;
  fc.record_every = 100;
  const auto shear = nsfp::nsfp_run(g, nsfp::make_fluid_state(g, zero, u, zero), tc, fc);
  double shear_err = 0.0;
  for (std::size_t r = 0; r < shear.states.size(); ++r) {
    const double t = shear.times[r];
    const Vector want = u[0] * std::exp(-tc.lambda * k * k * t);
    shear_err = std::max(shear_err, (shear.states[r].u[0] - want).cwiseAbs().maxCoeff() / A);
  }
  // Constraint on a nonlinear run with every step recorded.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  Vector rho = zero, th = zero;
  nsfp::VectorField v{zero, zero, zero};
  for (int m = 1; m <= 2; ++m) {
    const double a[6] = {U(rng), U(rng), U(rng), U(rng), U(rng), U(rng)};
    for (Eigen::Index c = 0; c < n; ++c) {
      const Vec3 x = g.position(std::size_t(c));
      rho[c] += 0.1 * a[0] * std::cos(m * x.x() + a[1]);
      th[c] += 0.1 * a[2] * std::sin(m * x.y() + a[3]);
      v[0][c] += 0.2 * a[4] * std::sin(m * x.z());
      v[1][c] += 0.2 * a[5] * std::cos(m * x.x());
      v[2][c] += 0.2 * a[4] * std::sin(m * x.y());
    }
  }
  nsfp::FluidConfig nc;
  nc.dt = 5e-3;
  nc.t_end = 1.0;
  nc.record_every = 1;
  const auto nl = nsfp::nsfp_run(g, nsfp::make_fluid_state(g, rho, v, th), tc, nc);
  const double rate = shear_err / T;
  return {rate <= 1e-6 && nl.max_constraint_residual <= 1e-12,
          "shear decay max rel error per unit time=" + num(rate) + " (tol 1e-06); constraint residual max over " +
              std::to_string(nl.states.size() - 1) + " steps=" + num(nl.max_constraint_residual) + " (tol 1e-12)"};
}

Outcome c9_characteristics() {
  const auto [code, r] = run("characteristics", config("characteristics.ini", "c9"));
  if (!r.contains("rows")) return {false, "characteristics exited " + std::to_string(code)};
  std::string d = "max|d2 phi|=" + num(r["max_hessian"]);
  bool ok = code == 0 && r["max_hessian"].get<double>() <= 1e-2 * (1 + 1e-12);
  for (const auto& row : r["rows"]) {
    d += "; eps " + num(row["eps"]) + ": margin=" + num(row["bracket_margin"]) + " free_err=" +
         num(row["free_streaming_rel_error"]);
    ok = ok && row["bracket_margin"].get<double>() <= 1.0 && row["free_streaming_rel_error"].get<double>() <= 1e-10;
  }
  return {ok, d};
}

Outcome c10_nu_tilde() {
  Outcome o{true, ""};
  for (double gamma : {-1.0, -2.0}) {
    auto c = config("nu_tilde.ini", "c10_gamma" + num(gamma));
    c.gamma = gamma;
    c.weights.sigma_exp = 1.0 / 24.0;
    const auto [code, r] = run("nu-tilde-check", c);
    if (!r.contains("rows")) return {false, "nu-tilde-check exited " + std::to_string(code)};
    double lo = 1e300, change = 0.0;
    for (const auto& row : r["rows"]) {
      lo = std::min(lo, row["min_ratio"].get<double>());
      change = std::max(change, row["relative_change"].get<double>());
    }
    o.pass = o.pass && code == 0 && lo > 0.0 && change < 0.05;
    o.detail += "gamma " + num(gamma) + ": varrho=" + num(r["varrho"]) + " min ratio=" + num(lo) +
                " max refine change=" + num(change) + "; ";
  }
  o.detail += "(positive, change < 0.05)";
  return o;
}

Outcome c11_ledger() {
  if (g_ledgers.empty()) return {false, "no nonlinear runs recorded"};
  double rate = 0.0, neut = 0.0, pois = 0.0;
  for (const auto& l : g_ledgers) {
    rate = std::max(rate, l.mass_rate);
    neut = std::max(neut, l.neutrality);
    pois = std::max(pois, l.poisson);
  }
  return {rate <= 1e-8 && neut <= tol::cons && pois <= 1e-12,
          std::to_string(g_ledgers.size()) + " runs: max mass drift/time=" + num(rate) + " (1e-08), max |mean a|=" +
              num(neut) + " (1e-06), max Poisson residual=" + num(pois) + " (1e-12, relative)"};
}

int cli(const std::string& args) {
  const std::string cmd = std::string(VPB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome c12_determinism() {
  // Reduced configs so that every subcommand can run twice.
  const std::vector<std::pair<std::string, std::string>> cases{
      {"operator-audit", "[velocity]\ncount = 12\nradius = 6\n[audit]\nrefined_count = 16\n"},
      {"linear-decay", "[velocity]\ncount = 12\nradius = 6\n[run]\neps = 1\n[decay]\nk_count = 6\nt_end = 20\n"
                       "window_lo = 5\nwindow_hi = 20\n"},
      {"nonlinear-run", "[velocity]\ncount = 12\nradius = 6\n[space]\ncount = 16\n[run]\neps = 0.5\n[solver]\n"
                        "t_end = 0.25\nrecord_every = 5\n[initial]\npreset = random_macro\n"},
      {"nsfp-run", "[velocity]\ncount = 12\nradius = 6\n[space]\ncount = 16\n[solver]\nt_end = 0.2\n[initial]\n"
                   "preset = random_macro\n"},
      {"hydro-limit", "[velocity]\ncount = 12\nradius = 6\n[space]\ncount = 16\n[run]\neps_list = 0.5, 0.25\n"
                      "[solver]\nt_end = 0.1\n[initial]\npreset = random_macro\n"},
      {"characteristics", "[run]\neps_list = 1, 0.5\n"},
      {"nu-tilde-check", "[model]\ngamma = -1\n[velocity]\ncount = 12\nradius = 6\n[run]\neps_list = 1\n"},
  };
  const fs::path dir = kOut / "c12";
  fs::create_directories(dir);
  int compared = 0;
  std::string bad;
  for (const auto& [sub, text] : cases) {
    std::cerr << "criterion 12: " << sub << "\n";
    const fs::path ini = dir / (sub + ".ini");
    std::ofstream(ini) << text;
    std::vector<fs::path> outs;
    for (const char* rep : {"a", "b"}) {
      const fs::path out = dir / (sub + "_" + rep);
      fs::remove_all(out);
      const int rc = cli(sub + " --config " + ini.string() + " --out " + out.string() + " --seed 11");
      if (rc != 0 && rc != 4) bad += sub + " exited " + std::to_string(rc) + "; ";
      outs.push_back(out);
    }
    // Every CSV and the JSON report must match byte for byte; the manifest holds timestamps.
    for (const auto& e : fs::directory_iterator(outs[0])) {
      const auto name = e.path().filename().string();
      if (name == "manifest.json") continue;
      ++compared;
      if (slurp(e.path()) != slurp(outs[1] / name)) bad += sub + "/" + name + " differs; ";
    }
  }
  return {bad.empty() && compared >= 7,
          "7 subcommands run twice via the CLI, " + std::to_string(compared) + " files compared" +
              (bad.empty() ? ", all bit-identical" : ": " + bad)};
}

}  // namespace

int main() {
  fs::create_directories(kOut);
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 = no runtime bound
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "operator audit", 120, c1_operator_audit},
      {2, "collision invariants", 300, c2_collision_invariants},
      {3, "linear whole-space decay", 600, c3_linear_decay},
      {4, "mode-energy dissipation", 0, c4_mode_energy},
      {5, "eps^2 micro scaling", 600, c5_eps_squared},
      {6, "hydrodynamic limit", 1800, c6_hydro_limit},
      {7, "transport coefficients", 0, c7_transport_coefficients},
      {8, "NSFP exactness", 0, c8_nsfp},
      {9, "characteristics bracket", 0, c9_characteristics},
      {10, "nu-tilde lower bound", 0, c10_nu_tilde},
      {11, "conservation ledger", 0, c11_ledger},
      {12, "determinism", 0, c12_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::cerr << "== criterion " << c.id << ": " << c.name << "\n";
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = num(secs) + " s";
    if (c.budget_s > 0) {
      timing += " of " + num(c.budget_s) + " s";
      if (secs > c.budget_s) {
        o.pass = false;
        timing += " OVER BUDGET";
      }
    }
    if (!o.pass) ++failed;
    std::cout << "CRITERION " << c.id << " " << (o.pass ? "PASS" : "FAIL") << " [" << c.name << "] " << o.detail << " ("
              << timing << ")" << std::endl;
  }
  std::cout << (failed == 0 ? "ALL CRITERIA PASS" : std::to_string(failed) + " CRITERIA FAIL") << std::endl;
  return failed == 0 ? 0 : 1;
}
