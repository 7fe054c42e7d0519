#include "vpb/diagnostics/hydro_limit.hpp"

#include "vpb/solver/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace vpb::diagnostics {

nsfp::FluidRun fluid_view(const solver::RecordedRun& run, const solver::SolverOperators& ops) {
  nsfp::FluidRun out;
  for (std::size_t r = 0; r < run.states.size(); ++r) {
    const auto m = solver::macro_fields(ops.vgrid, run.states[r].f);
    nsfp::FluidState s;
    s.rho = m.a;
    s.theta = m.c;
    s.u = m.b;
    s.phi = run.states[r].phi;
    s.time = run.times[r];
    out.times.push_back(run.times[r]);
    out.states.push_back(std::move(s));
  }
  return out;
}

namespace {

double l2(const solver::SpatialGrid& g, const Vector& v) { return std::sqrt(v.squaredNorm() * g.cell_volume()); }

// Index of the fluid record at time t, or throws.
std::size_t match_time(const nsfp::FluidRun& fluid, double t) {
  for (std::size_t i = 0; i < fluid.times.size(); ++i)
    if (std::abs(fluid.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  throw PreconditionError("hydro_limit_error: no fluid record at kinetic time " + std::to_string(t));
}

}  // namespace

HydroLimitTable hydro_limit_error(const std::vector<solver::RecordedRun>& kinetic_runs, const nsfp::FluidRun& fluid,
                                  const solver::SolverOperators& ops) {
  if (kinetic_runs.empty()) throw PreconditionError("hydro_limit_error: no kinetic runs");
  if (fluid.states.empty()) throw PreconditionError("hydro_limit_error: empty fluid run");
  const auto& sg = ops.sgrid;
  const auto cells = static_cast<Eigen::Index>(sg.cells());
  if (fluid.states.front().rho.size() != cells) throw PreconditionError("hydro_limit_error: fluid grid mismatch");

  HydroLimitTable table;
  for (const auto& run : kinetic_runs) {
    if (run.states.empty()) throw PreconditionError("hydro_limit_error: empty kinetic run");
    HydroLimitRow row;
    row.eps = run.eps;
    for (std::size_t r = 0; r < run.states.size(); ++r) {
      const auto& ks = run.states[r];
      if (ks.f.cols() != cells || static_cast<std::size_t>(ks.f.rows()) != ops.vgrid.size())
        throw PreconditionError("hydro_limit_error: kinetic grid mismatch");
      const auto& fs = fluid.states[match_time(fluid, run.times[r])];
      const auto m = solver::macro_fields(ops.vgrid, ks.f);
      row.rho = std::max(row.rho, l2(sg, m.a - fs.rho));
      row.theta = std::max(row.theta, l2(sg, m.c - fs.theta));
      double u2 = 0.0, g2 = 0.0;
      const auto gk = solver::gradient(sg, ks.phi);
      const auto gf = solver::gradient(sg, fs.phi);
      for (int d = 0; d < 3; ++d) {
        u2 += std::pow(l2(sg, m.b[d] - fs.u[d]), 2);
        g2 += std::pow(l2(sg, gk[d] - gf[d]), 2);
      }
      row.u = std::max(row.u, std::sqrt(u2));
      row.grad_phi = std::max(row.grad_phi, std::sqrt(g2));
      row.times.push_back(run.times[r]);
      row.per_time.push_back({l2(sg, m.a - fs.rho), std::sqrt(u2), l2(sg, m.c - fs.theta), std::sqrt(g2)});
    }
    row.total = std::sqrt(row.rho * row.rho + row.u * row.u + row.theta * row.theta + row.grad_phi * row.grad_phi);
    table.rows.push_back(row);
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) { return a.eps > b.eps; });
  table.strictly_decreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (!(table.rows[i].total < table.rows[i - 1].total)) table.strictly_decreasing = false;
  if (table.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(table.rows.size());
    bool positive = true;
    for (const auto& r : table.rows) {
      if (!(r.total > 0.0)) positive = false;
      const double x = std::log(r.eps), y = std::log(std::max(r.total, 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    table.order = positive && den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  }
  return table;
}

}  // namespace vpb::diagnostics
