#include "vpb/spectral/whole_space.hpp"

#include "vpb/parallel.hpp"

#include <cmath>
#include <sstream>

namespace vpb::spectral {

RadialKGrid log_k_grid(double k_min, double k_max, int count) {
  if (!(k_min > 0.0 && k_max > k_min) || count < 2) throw PreconditionError("k grid: need 0 < k_min < k_max, count >= 2");
  RadialKGrid g;
  const double du = std::log(k_max / k_min) / (count - 1);
  for (int n = 0; n < count; ++n) {
    const double k = k_min * std::exp(n * du);
    g.nodes.push_back(k);
    // dk = k du; trapezoid in u.
    const double end = (n == 0 || n == count - 1) ? 0.5 : 1.0;
    g.weights.push_back(end * du * k);
  }
  return g;
}

WholeSpaceNorms synthesize_whole_space_norms(const RadialKGrid& kgrid, const std::function<CVector(double)>& initial,
                                             const std::function<ModeOperator(double)>& factory,
                                             const std::vector<double>& t_grid, const EvolveOptions& opts) {
  if (kgrid.nodes.empty() || kgrid.nodes.size() != kgrid.weights.size())
    throw PreconditionError("whole-space synthesis: malformed k grid");
  WholeSpaceNorms out;
  const double kmin = kgrid.nodes.front();
  if (kmin > 1e-2) {
    std::ostringstream os;
    os << "k_min = " << kmin << " > 1e-2: low-k content is cut off and the decay turns exponential";
    out.warnings.push_back(os.str());
  } else if (!t_grid.empty() && kmin * kmin * t_grid.back() > 1.0) {
    std::ostringstream os;
    os << "k_min^2 t_end = " << kmin * kmin * t_grid.back() << " > 1: the k grid does not resolve the window";
    out.warnings.push_back(os.str());
  }

  const std::size_t nk = kgrid.nodes.size(), nt = t_grid.size();
  std::vector<std::vector<double>> l2(nk), mixed(nk), field(nk);
  parallel_for(nk, [&](std::size_t q) {
    const double k = kgrid.nodes[q];
    const CVector c0 = initial(k);
    l2[q].assign(nt, 0.0);
    mixed[q].assign(nt, 0.0);
    field[q].assign(nt, 0.0);
    if (c0.squaredNorm() == 0.0) return;
    const ModeOperator mop = factory(k);
    const auto traj = evolve_mode(mop, c0, t_grid, opts);
    for (std::size_t n = 0; n < nt; ++n) {
      const double f2 = traj[n].squaredNorm();
      l2[q][n] = f2;
      mixed[q][n] = k * k * f2;
      field[q][n] = std::norm(mop.density(traj[n])) / (k * k);
    }
  });

  for (auto* s : {&out.l2, &out.grad_x, &out.grad_phi}) {
    s->times = t_grid;
    s->values.assign(nt, 0.0);
  }
  out.l2.label = "l2";
  out.grad_x.label = "grad_x";
  out.grad_phi.label = "grad_phi";
  // Ordered reduction over k keeps the sums independent of the worker count.
  for (std::size_t q = 0; q < nk; ++q) {
    const double k = kgrid.nodes[q];
    const double wq = 4.0 * kPi * k * k * kgrid.weights[q];
    for (std::size_t n = 0; n < nt; ++n) {
      out.l2.values[n] += wq * l2[q][n];
      out.grad_x.values[n] += wq * mixed[q][n];
      out.grad_phi.values[n] += wq * field[q][n];
    }
  }
  return out;
}

std::function<CVector(double)> isotropic_preset(const std::string& name, const ModeBasis& basis,
                                                const kinetic::VelocityGrid& grid) {
  Vector nodal;
  if (name == "chi_sqrt_mu") {
    nodal = grid.sqrt_mu;
  } else if (name == "chi_temperature") {
    nodal = grid.sample([](const Vec3& v) { return 0.5 * (v.squaredNorm() - 3.0); }).cwiseProduct(grid.sqrt_mu);
  } else {
    throw PreconditionError("unknown initial-data preset '" + name + "'");
  }
  const CVector c = basis.coordinates(nodal).cast<cplx>();
  return [c](double k) { return k <= 1.0 ? c : CVector(CVector::Zero(c.size())); };
}

}  // namespace vpb::spectral
