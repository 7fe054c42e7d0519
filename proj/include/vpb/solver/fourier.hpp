#pragma once

#include "vpb/solver/spatial_grid.hpp"

#include <array>
#include <memory>

namespace vpb::solver {

// Batched real FFT over the spatial axes. Input is a column-major
// (howmany x cells) matrix: row r holds one field sampled at every cell.
class Fourier {
 public:
  Fourier(const SpatialGrid& grid, int howmany);
  ~Fourier();
  Fourier(const Fourier&) = delete;
  Fourier& operator=(const Fourier&) = delete;

  // (howmany x spectral_cells), unnormalized.
  CMatrix forward(const Matrix& fields) const;
  // Inverse including the 1 / cells normalisation.
  Matrix backward(const CMatrix& spectrum) const;

  const SpatialGrid& grid() const { return grid_; }
  int howmany() const { return howmany_; }

 private:
  struct Plans;
  SpatialGrid grid_;
  int howmany_;
  std::unique_ptr<Plans> plans_;
};

Vector spectral_derivative(const SpatialGrid& grid, const Vector& field, int axis);
std::array<Vector, 3> gradient(const SpatialGrid& grid, const Vector& field);
Vector laplacian(const SpatialGrid& grid, const Vector& field);
double spatial_mean(const Vector& field);

// -Delta phi = a with zero-mean phi. Throws PreconditionError when the mean of
// a exceeds tol::cons * max(1, max|a|) (no periodic solution).
Vector poisson_solve(const SpatialGrid& grid, const Vector& a);
// ||Delta phi + a|| / max(||a||, tiny).
double poisson_residual(const SpatialGrid& grid, const Vector& phi, const Vector& a);

}  // namespace vpb::solver
