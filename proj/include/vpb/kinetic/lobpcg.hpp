#pragma once

#include "vpb/common.hpp"

#include <functional>

namespace vpb::kinetic {

struct LobpcgResult {
  Vector values;   // ascending
  Matrix vectors;  // columns, B-orthonormal
  int iterations = 0;
  bool converged = false;
};

// Smallest eigenpairs of A x = lambda B x (A symmetric, B diagonal positive)
// restricted to the Euclidean orthogonal complement of span(Y) (Y orthonormal).
// The preconditioner is the diagonal `precond` (applied elementwise).
LobpcgResult lobpcg(const std::function<void(const Matrix&, Matrix&)>& apply_A, const Vector& B_diag,
                    const Vector& precond, const Matrix& Y, int n_eig, double tol = 1e-6,
                    int max_iter = 400, unsigned seed = 12345u);

}  // namespace vpb::kinetic
