#pragma once

#include "vpb/solver/spatial_grid.hpp"

#include <vector>

namespace vpb::diagnostics {

// phi(tau, x): piecewise linear in tau between samples, spectral in x.
// A single sample is a frozen field.
class PotentialHistory {
 public:
  PotentialHistory(const solver::SpatialGrid& grid, std::vector<double> times, const std::vector<Vector>& phis);
  static PotentialHistory frozen(const solver::SpatialGrid& grid, const Vector& phi);

  Vec3 gradient(double tau, const Vec3& x) const;
  Eigen::Matrix3d hessian(double tau, const Vec3& x) const;
  void evaluate(double tau, const Vec3& x, Vec3& grad, Eigen::Matrix3d& hess) const;
  const solver::SpatialGrid& grid() const { return grid_; }
  double t_min() const { return times_.front(); }
  double t_max() const { return times_.back(); }
  // max_x |d^2 phi| entrywise over every sample, evaluated on the grid.
  double max_hessian() const;

 private:
  struct Slice {
    std::vector<Vec3> k;            // wavenumbers of the retained modes
    std::vector<cplx> coefficient;  // full-spectrum coefficients / cells
  };
  void eval(const Slice& s, const Vec3& x, Vec3& g, Eigen::Matrix3d& H) const;

  solver::SpatialGrid grid_;
  std::vector<double> times_;
  std::vector<Slice> slices_;
};

struct CharacteristicPath {
  std::vector<double> taus;  // decreasing from t to 0
  std::vector<Vec3> X;
  std::vector<Vec3> V;
  std::vector<double> jac_det;  // |det dX/dv|
};

// Backward RK4 for dX/dtau = V/eps, dV/dtau = -grad phi(tau, X) with the
// variational system for (dX/dv, dV/dv). Terminal data X(t) = x, V(t) = v.
CharacteristicPath trace_characteristics(const PotentialHistory& phi, double eps, double t, const Vec3& x,
                                         const Vec3& v, int n_steps);

// Largest violation of (1/(2 eps^3))|t - tau|^3 <= det <= (2/eps^3)|t - tau|^3
// as a ratio (<= 1 means the bracket holds); tau = t is skipped.
double jacobian_bracket_margin(const CharacteristicPath& path, double eps);

}  // namespace vpb::diagnostics
