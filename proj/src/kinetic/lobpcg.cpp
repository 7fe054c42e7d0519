#include "vpb/kinetic/lobpcg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vpb::kinetic {

namespace {

void deflate(const Matrix& Y, Matrix& X) {
  if (Y.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) X -= Y * (Y.transpose() * X);
}

// Columns of S spanning the same space, B-orthonormal; near-dependent
// directions are dropped. Returns the transformation T with S_new = S T.
Matrix b_orthonormalizer(const Matrix& S, const Vector& B) {
  const Matrix G = S.transpose() * B.asDiagonal() * S;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G + G.transpose()));
  const double top = es.eigenvalues().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < G.rows(); ++i)
    if (es.eigenvalues()[i] > 1e-14 * top) keep.push_back(i);
  Matrix T(G.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    T.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) / std::sqrt(es.eigenvalues()[keep[c]]);
  return T;
}

}  // namespace

LobpcgResult lobpcg(const std::function<void(const Matrix&, Matrix&)>& apply_A, const Vector& B,
                    const Vector& precond, const Matrix& Y, int n_eig, double tol, int max_iter,
                    unsigned seed) {
  const Eigen::Index n = B.size();
  const int m = std::min<int>(n_eig + 2, static_cast<int>(n - Y.cols()));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix X(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = nd(rng);
  deflate(Y, X);
  X = X * b_orthonormalizer(X, B);

  Matrix AX(n, X.cols()), P(n, 0), AP(n, 0);
  apply_A(X, AX);
  LobpcgResult res;
  // Initial Rayleigh-Ritz.
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(X.transpose() * AX);
    X = X * es.eigenvectors();
    AX = AX * es.eigenvectors();
  }
  Vector lam(X.cols());
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    for (Eigen::Index j = 0; j < X.cols(); ++j) lam[j] = X.col(j).dot(AX.col(j));
    Matrix R = AX - B.asDiagonal() * X * lam.asDiagonal();
    deflate(Y, R);
    bool done = true;
    const double scale = std::max(std::abs(lam[std::min<Eigen::Index>(n_eig - 1, lam.size() - 1)]), 1e-300);
    for (int j = 0; j < n_eig; ++j) {
      const double rn = R.col(j).norm() / std::sqrt(B.cwiseProduct(X.col(j)).cwiseProduct(X.col(j)).sum());
      if (rn > tol * std::max(scale, std::abs(lam[j]))) done = false;
    }
    if (done) {
      res.converged = true;
      break;
    }
    Matrix W = precond.asDiagonal() * R;
    deflate(Y, W);
    Matrix AW(n, W.cols());
    apply_A(W, AW);
    const Eigen::Index np = P.cols();
    Matrix S(n, X.cols() + W.cols() + np), AS(n, S.cols());
    S << X, W, P;
    AS << AX, AW, AP;
    const Matrix T = b_orthonormalizer(S, B);
    const Matrix Sb = S * T, ASb = AS * T;
    Matrix Ar = Sb.transpose() * ASb;
    Ar = 0.5 * (Ar + Ar.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(Ar);
    const Matrix Cm = es.eigenvectors().leftCols(X.cols());
    const Matrix Xn = Sb * Cm, AXn = ASb * Cm;
    // Search direction: the part of the update outside span(X).
    const Matrix coefX = X.transpose() * B.asDiagonal() * Xn;
    P = Xn - X * coefX;
    AP = AXn - AX * coefX;
    X = Xn;
    AX = AXn;
  }
  for (Eigen::Index j = 0; j < X.cols(); ++j) lam[j] = X.col(j).dot(AX.col(j));
  res.values = lam.head(n_eig);
  res.vectors = X.leftCols(n_eig);
  return res;
}

}  // namespace vpb::kinetic
