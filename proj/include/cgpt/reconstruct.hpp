#pragma once

#include "cgpt/acquisition.hpp"
#include "cgpt/types.hpp"

namespace cgpt {

/// Ascending grid of Tikhonov regularization weights.
struct RegularizationGrid {
  std::vector<double> mu;

  /// 26 logarithmically spaced points on [1e-6, 1e-1].
  static RegularizationGrid log_default();
};

/// Minimal-norm least-squares recovery of the order-K CGPT from MSR data
/// (delegates to the pseudo-inverse of the forward operator).
CgptMatrix solve_least_squares(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                               PinvInfo* info = nullptr);

/// Unique minimizer of ||L(M) - V||_F^2 + mu ||M||_F^2, computed in the
/// singular basis of the forward operator: each coefficient is filtered by
/// sigma / (sigma^2 + mu). Always well-posed for mu > 0.
CgptMatrix solve_tikhonov(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                          double mu);

struct MuSelection {
  double mu = 0.0;
  double error = 0.0;  // relative Frobenius error on the first two orders
};

/// Benchmark-mode choice of mu: the grid value whose Tikhonov solution has
/// the smallest first-two-orders error against the known ground truth.
MuSelection select_mu(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                      const CgptMatrix& M_true, const RegularizationGrid& grid);

/// Relative Frobenius error restricted to the leading `orders` harmonic
/// orders (clamped to the order of M_true).
double leading_orders_error(const CgptMatrix& estimate, const CgptMatrix& truth,
                            int orders = 2);

/// Dirichlet kernel sin((K + 1/2) theta) / sin(theta / 2); equals 2K + 1 at
/// theta = 0 (mod 2*pi).
double dirichlet_kernel(int K, double theta);

/// Lagrange-type trigonometric interpolation kernel h_s for the given
/// distinct nodes: product of sine ratios, with an extra cos((theta -
/// theta_s)/2) factor when the node count is even. Satisfies
/// h_s(theta_t) = delta_st.
double interpolation_kernel(const std::vector<double>& angles, int s, double theta);

/// Explicit 2K x N left inverse of the coefficient matrix: row 2k-1 (2k) of
/// the result holds (1/pi) * integral of h_s(theta) cos(k theta)
/// (respectively sin). The integrals are evaluated exactly by the uniform
/// trapezoidal rule with 2(N + 2K) + 1 nodes, which is exact because the
/// integrand is a trigonometric polynomial of degree at most floor(N/2) + K.
/// Requires N > 2K and distinct angles.
Eigen::MatrixXd left_inverse(const std::vector<double>& angles, int K);

/// Odd-N shortcut for left_inverse: discrete sums of the kernels over the
/// uniform grid 2*pi*n/N.
Eigen::MatrixXd left_inverse_odd_sum(const std::vector<double>& angles, int K);

/// Exact noise-free limited-view recovery M = D^-1 Ctilde V Ctilde^T D^-1.
/// Only meaningful for V in the range of the forward operator; any noise is
/// amplified by the (possibly enormous) kernel magnitudes.
CgptMatrix noiseless_inversion(const MsrMatrix& V, const AcquisitionGeometry& geom, int K);

}  // namespace cgpt
