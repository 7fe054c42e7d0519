#include "vpb/diagnostics/nu_tilde.hpp"

#include "vpb/kinetic/collision.hpp"

#include <cmath>
#include <limits>

namespace vpb::diagnostics {

double nu_tilde(const kinetic::WeightSpec& spec, double nu, double eps, double t, const Vec3& v,
                const Vec3& grad_phi) {
  const double drift = (0.5 + 2.0 * spec.theta_tilde(t)) * v.dot(grad_phi);
  const double growth = spec.vartheta * spec.sigma_exp * v.squaredNorm() / std::pow(1.0 + t, 1.0 + spec.sigma_exp);
  return nu + eps * eps * (drift + growth);
}

double varrho(const kinetic::WeightSpec& spec, const kinetic::PotentialModel& model) {
  return (spec.sigma_exp * model.gamma + 2.0) / (2.0 - model.gamma);
}

NuTildeSamples NuTildeSamples::default_set(int refine) {
  if (refine < 1) throw PreconditionError("nu-tilde samples: refine must be >= 1");
  // The minimiser in |v| moves out like (1+t)^{(1+sigma)/(2-gamma)}, so both
  // axes are geometric; nested under doubling.
  constexpr double t_max = 1000.0, v_lo = 0.25, v_hi = 4000.0;
  const int nt = 24 * refine, nv = 96 * refine;
  NuTildeSamples s;
  for (int j = 0; j <= nt; ++j) s.times.push_back(std::pow(1.0 + t_max, double(j) / nt) - 1.0);
  s.speeds.push_back(0.0);
  for (int i = 0; i <= nv; ++i) s.speeds.push_back(v_lo * std::pow(v_hi / v_lo, double(i) / nv));
  return s;
}

FieldBound decaying_field_bound(double delta) {
  return [delta](double t) { return delta * std::pow(1.0 + t, -1.25); };
}

NuTildeCheck nu_tilde_bound_check(const kinetic::WeightSpec& spec, const kinetic::PotentialModel& model,
                                  const kinetic::VelocityGrid& grid, const kinetic::AngularQuadrature& angular,
                                  double eps, const FieldBound& field, const NuTildeSamples& samples) {
  spec.validate();
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("nu-tilde check: eps must lie in (0, 1]");
  NuTildeCheck out;
  out.spec = spec;
  out.eps = eps;
  out.varrho = varrho(spec, model);
  out.min_ratio = std::numeric_limits<double>::infinity();
  // nu is isotropic: one evaluation per speed along e1.
  std::vector<double> nu;
  nu.reserve(samples.speeds.size());
  for (double r : samples.speeds) nu.push_back(kinetic::collision_frequency(model, grid, angular, Vec3(r, 0.0, 0.0)));
  const double scale = std::pow(eps, -0.8);
  for (double t : samples.times) {
    const double bound = scale * std::pow(1.0 + t, out.varrho - 1.0);
    const double E = field(t);
    for (std::size_t i = 0; i < samples.speeds.size(); ++i) {
      const Vec3 v(samples.speeds[i], 0.0, 0.0);
      const Vec3 grad(-E, 0.0, 0.0);  // anti-parallel to v
      const double ratio = nu_tilde(spec, nu[i], eps, t, v, grad) / (eps * eps) / bound;
      if (ratio < out.min_ratio) {
        out.min_ratio = ratio;
        out.worst_t = t;
        out.worst_v = v;
      }
    }
  }
  return out;
}

}  // namespace vpb::diagnostics
