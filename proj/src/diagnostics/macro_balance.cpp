#include "vpb/diagnostics/macro_balance.hpp"

#include "vpb/diagnostics/derivatives.hpp"
#include "vpb/solver/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace vpb::diagnostics {

using solver::SolverOperators;
using solver::spectral_derivative;

namespace {

// Moments and balance-law right-hand sides at one record.
struct Snapshot {
  Vector a, c;
  std::array<Vector, 3> b;
  Vector ra, rc;
  std::array<Vector, 3> rb;
};

Snapshot evaluate(const solver::KineticState& s, const SolverOperators& ops) {
  const auto& vg = ops.vgrid;
  const auto& sg = ops.sgrid;
  const double eps = s.eps;
  const auto m = solver::macro_fields(vg, s.f);
  Matrix micro = s.f;
  ops.proj->micro_inplace(micro);

  // Test functions for the micro fluxes: v_i v_j sqrt(mu) (6) and v_j |v|^2 sqrt(mu) (3).
  const auto nv = static_cast<Eigen::Index>(vg.size());
  Matrix test(nv, 9);
  for (Eigen::Index i = 0; i < nv; ++i) {
    const Vec3& v = vg.nodes[static_cast<std::size_t>(i)];
    const double w = vg.quad_weights[i] * vg.sqrt_mu[i];
    int col = 0;
    for (int p = 0; p < 3; ++p)
      for (int q = p; q < 3; ++q) test(i, col++) = w * v[p] * v[q];
    for (int p = 0; p < 3; ++p) test(i, 6 + p) = w * v[p] * v.squaredNorm();
  }
  const Matrix flux = test.transpose() * micro;  // 9 x cells
  auto pi = [&](int p, int q) -> Vector {
    if (p > q) std::swap(p, q);
    static const int idx[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
    return flux.row(idx[p][q]).transpose();
  };

  Snapshot out;
  out.a = m.a;
  out.b = m.b;
  out.c = m.c;
  const auto gphi = solver::gradient(sg, s.phi);
  Vector divb = Vector::Zero(m.a.size()), divq = Vector::Zero(m.a.size());
  for (int j = 0; j < 3; ++j) {
    divb += spectral_derivative(sg, m.b[j], j);
    divq += spectral_derivative(sg, flux.row(6 + j).transpose(), j);
  }
  out.ra = -divb / eps;
  const Vector pot = m.a + m.c + s.phi;
  for (int i = 0; i < 3; ++i) {
    Vector r = -spectral_derivative(sg, pot, i) / eps - m.a.cwiseProduct(gphi[i]);
    for (int j = 0; j < 3; ++j) r -= spectral_derivative(sg, pi(i, j), j) / eps;
    out.rb[i] = r;
  }
  Vector work = Vector::Zero(m.a.size());
  for (int j = 0; j < 3; ++j) work += gphi[j].cwiseProduct(m.b[j]);
  out.rc = -(2.0 / (3.0 * eps)) * divb - (2.0 / 3.0) * work - divq / (3.0 * eps);
  return out;
}

struct Triple {
  double mass, momentum, energy;
};

Triple residual(const Snapshot& lo, const Snapshot& mid, const Snapshot& hi, double span, double dV) {
  auto norm = [dV](const Vector& v) { return std::sqrt(v.squaredNorm() * dV); };
  const double m = norm((hi.a - lo.a) / span - mid.ra);
  double mom2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double n = norm((hi.b[i] - lo.b[i]) / span - mid.rb[i]);
    mom2 += n * n;
  }
  const double e = norm((hi.c - lo.c) / span - mid.rc);
  return {m, std::sqrt(mom2), e};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

}  // namespace

BalanceResiduals macro_balance_residual(const solver::RecordedRun& run, const SolverOperators& ops) {
  const std::size_t n = run.states.size();
  if (n < 3) throw PreconditionError("macro_balance_residual: need at least 3 records");
  const double delta = run.times[1] - run.times[0];
  for (std::size_t r = 1; r < n; ++r)
    if (std::abs(run.times[r] - run.times[r - 1] - delta) > 1e-9 * std::max(1.0, delta))
      throw PreconditionError("macro_balance_residual: records are not uniformly spaced");

  std::vector<Snapshot> snaps;
  snaps.reserve(n);
  for (const auto& s : run.states) snaps.push_back(evaluate(s, ops));
  const double dV = ops.sgrid.cell_volume();

  BalanceResiduals out;
  std::vector<double> narrow, wide;
  for (std::size_t r = 1; r + 1 < n; ++r) {
    const Triple t = residual(snaps[r - 1], snaps[r], snaps[r + 1], 2.0 * delta, dV);
    out.times.push_back(run.times[r]);
    out.mass.push_back(t.mass);
    out.momentum.push_back(t.momentum);
    out.energy.push_back(t.energy);
    if (r >= 2 && r + 2 < n) {
      const Triple w = residual(snaps[r - 2], snaps[r], snaps[r + 2], 4.0 * delta, dV);
      narrow.push_back(t.mass + t.momentum + t.energy);
      wide.push_back(w.mass + w.momentum + w.energy);
    }
  }
  // A residual that grows ~4x under doubling of the stride is differencing error.
  const double nm = median(narrow), wm = median(wide);
  if (nm > 0.0 && wm / nm > 2.5)
    out.warnings.push_back("time-derivative differencing error dominates the residual; record more densely");
  return out;
}

std::pair<double, double> micro_part_smallness(const solver::RecordedRun& run, const SolverOperators& ops) {
  if (run.states.empty()) throw PreconditionError("micro_part_smallness: empty run");
  std::vector<double> val;
  for (const auto& s : run.states) {
    Matrix m = s.f;
    ops.proj->micro_inplace(m);
    val.push_back(sq_norm(ops.sgrid, ops.vgrid, m));
  }
  double integral = 0.0;
  for (std::size_t r = 1; r < val.size(); ++r)
    integral += 0.5 * (run.times[r] - run.times[r - 1]) * (val[r] + val[r - 1]);
  return {run.eps, integral};
}

}  // namespace vpb::diagnostics
