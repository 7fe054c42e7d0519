#include "vpb/solver/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace vpb::solver {

struct Fourier::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

namespace {

// The FFTW planner is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Fourier::Fourier(const SpatialGrid& grid, int howmany) : grid_(grid), howmany_(howmany), plans_(new Plans) {
  if (howmany < 1) throw PreconditionError("fourier: howmany must be positive");
  const int n = grid.per_axis_count;
  int dims[3] = {n, n, n};
  const int rank = grid.dim;
  const auto total = static_cast<std::size_t>(howmany) * grid.cells();
  const auto stotal = static_cast<std::size_t>(howmany) * grid.spectral_cells();
  std::lock_guard<std::mutex> lock(planner_mutex());
  double* in = fftw_alloc_real(total);
  fftw_complex* out = fftw_alloc_complex(stotal);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_many_dft_r2c(rank, dims, howmany, in, nullptr, howmany, 1, out, nullptr, howmany, 1, flags);
  plans_->bwd = fftw_plan_many_dft_c2r(rank, dims, howmany, out, nullptr, howmany, 1, in, nullptr, howmany, 1, flags);
  fftw_free(in);
  fftw_free(out);
  if (!plans_->fwd || !plans_->bwd) throw NumericError("fourier: FFTW planning failed");
}

Fourier::~Fourier() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_.reset();
}

CMatrix Fourier::forward(const Matrix& fields) const {
  if (fields.rows() != howmany_ || static_cast<std::size_t>(fields.cols()) != grid_.cells())
    throw PreconditionError("fourier: field block has the wrong shape");
  Matrix copy = fields;  // r2c may not modify its input, but keep the caller's data untouched regardless
  CMatrix out(howmany_, static_cast<Eigen::Index>(grid_.spectral_cells()));
  fftw_execute_dft_r2c(plans_->fwd, copy.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Matrix Fourier::backward(const CMatrix& spectrum) const {
  if (spectrum.rows() != howmany_ || static_cast<std::size_t>(spectrum.cols()) != grid_.spectral_cells())
    throw PreconditionError("fourier: spectrum block has the wrong shape");
  CMatrix copy = spectrum;  // c2r destroys its input
  Matrix out(howmany_, static_cast<Eigen::Index>(grid_.cells()));
  fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex*>(copy.data()), out.data());
  out /= double(grid_.cells());
  return out;
}

namespace {

template <class Mult>
Vector spectral_apply(const SpatialGrid& grid, const Vector& field, Mult mult) {
  const Fourier ft(grid, 1);
  CMatrix s = ft.forward(field.transpose());
  for (Eigen::Index m = 0; m < s.cols(); ++m) s(0, m) *= mult(static_cast<std::size_t>(m));
  return ft.backward(s).row(0).transpose();
}

}  // namespace

Vector spectral_derivative(const SpatialGrid& grid, const Vector& field, int axis) {
  if (axis >= grid.dim && grid.dim == 1) return Vector::Zero(field.size());
  return spectral_apply(grid, field, [&](std::size_t m) { return cplx(0.0, grid.wavenumber(m, true)[axis]); });
}

std::array<Vector, 3> gradient(const SpatialGrid& grid, const Vector& field) {
  return {spectral_derivative(grid, field, 0), spectral_derivative(grid, field, 1),
          spectral_derivative(grid, field, 2)};
}

Vector laplacian(const SpatialGrid& grid, const Vector& field) {
  return spectral_apply(grid, field, [&](std::size_t m) { return cplx(-grid.wavenumber(m, false).squaredNorm(), 0.0); });
}

double spatial_mean(const Vector& field) { return field.size() ? field.mean() : 0.0; }

Vector poisson_solve(const SpatialGrid& grid, const Vector& a) {
  if (static_cast<std::size_t>(a.size()) != grid.cells()) throw PreconditionError("poisson: field size mismatch");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (std::abs(spatial_mean(a)) > tol::cons * scale)
    throw PreconditionError("poisson: density has nonzero mean (no periodic solution)");
  return spectral_apply(grid, a, [&](std::size_t m) {
    const double k2 = grid.wavenumber(m, false).squaredNorm();
    return cplx(k2 > 0.0 ? 1.0 / k2 : 0.0, 0.0);
  });
}

double poisson_residual(const SpatialGrid& grid, const Vector& phi, const Vector& a) {
  // Compare with the zero-mean part of a: the mean is not representable.
  const Vector a0 = a.array() - spatial_mean(a);
  const double an = a0.norm();
  const double r = (laplacian(grid, phi) + a0).norm();
  return an > 0.0 ? r / an : r;
}

}  // namespace vpb::solver
