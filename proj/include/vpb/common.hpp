#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace vpb {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Tolerances shared by every module.
namespace tol {
inline constexpr double moment = 1e-6;
inline constexpr double cons = 1e-6;
inline constexpr double solve = 1e-8;
inline constexpr double mono = 1e-8;
inline constexpr double sym_rel = 1e-9;  // times ||diag nu||
}  // namespace tol

// Violated precondition or invalid parameter (maps to the config exit code).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown: NaN/Inf, failed solve, broken invariant.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, long step = -1)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace vpb
