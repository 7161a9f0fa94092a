#pragma once

#include "cgpt/algebra.hpp"
#include "cgpt/rng.hpp"
#include "cgpt/types.hpp"

#include <cmath>

namespace cgpt::test {

inline Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = rng.gaussian();
  return out;
}

inline CgptMatrix random_cgpt(int K, Rng& rng) {
  return CgptMatrix(K, random_matrix(2 * K, 2 * K, rng));
}

inline CgptMatrix random_symmetric_cgpt(int K, Rng& rng) {
  Eigen::MatrixXd a = random_matrix(2 * K, 2 * K, rng);
  return CgptMatrix(K, 0.5 * (a + a.transpose()));
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / want.norm();
}

// Transform oracle following the real-matrix route: scatter the four
// K x K products of J = U F back into the 2K x 2K block layout. Kept
// independent of the complex-CGPT code path in the library.
inline CgptMatrix transform_oracle(const CgptMatrix& M, const RigidMotion& motion) {
  const int K = M.K;
  const Eigen::MatrixXcd F = motion_matrix(motion, K);
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(2 * K, K);
  for (int k = 0; k < K; ++k) {
    U(2 * k, k) = std::complex<double>(1.0, 0.0);
    U(2 * k + 1, k) = std::complex<double>(0.0, 1.0);
  }
  const Eigen::MatrixXcd J = U * F;
  const Eigen::MatrixXd Jr = J.real(), Ji = J.imag();
  const Eigen::MatrixXd Ur = U.real(), Ui = U.imag();

  const Eigen::MatrixXd cc = Jr.transpose() * M.m * Jr;
  const Eigen::MatrixXd cs = Jr.transpose() * M.m * Ji;
  const Eigen::MatrixXd sc = Ji.transpose() * M.m * Jr;
  const Eigen::MatrixXd ss = Ji.transpose() * M.m * Ji;

  return CgptMatrix(K, Ur * cc * Ur.transpose() + Ur * cs * Ui.transpose() +
                           Ui * sc * Ur.transpose() + Ui * ss * Ui.transpose());
}

}  // namespace cgpt::test
