#include "cgpt/reconstruct.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace cgpt {

namespace {

void check_distinct(const std::vector<double>& angles) {
  for (std::size_t a = 0; a < angles.size(); ++a)
    for (std::size_t b = a + 1; b < angles.size(); ++b)
      if (std::abs(std::sin(0.5 * (angles[a] - angles[b]))) < 1e-12)
        throw std::invalid_argument("interpolation: coincident receiver angles");
}

}  // namespace

RegularizationGrid RegularizationGrid::log_default() {
  RegularizationGrid g;
  g.mu.resize(26);
  for (int j = 0; j < 26; ++j) g.mu[j] = std::pow(10.0, -6.0 + 5.0 * j / 25.0);
  return g;
}

CgptMatrix solve_least_squares(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                               PinvInfo* info) {
  return pinv_apply(V, geom, K, info);
}

CgptMatrix solve_tikhonov(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                          double mu) {
  if (mu <= 0.0) throw std::invalid_argument("solve_tikhonov: mu must be positive");
  const Eigen::MatrixXd A =
      coefficient_matrix(geom, K) * scaling_diagonal(geom.rho(), K).asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  // Coefficients of L*(V) in the singular basis, filtered by
  // sigma_a sigma_b / (sigma_a^2 sigma_b^2 + mu).
  const Eigen::MatrixXd B =
      sigma.asDiagonal() * (svd.matrixU().transpose() * V.v * svd.matrixU()) *
      sigma.asDiagonal();
  Eigen::MatrixXd filtered(2 * K, 2 * K);
  for (int a = 0; a < 2 * K; ++a)
    for (int b = 0; b < 2 * K; ++b) {
      const double s2 = sigma(a) * sigma(a) * sigma(b) * sigma(b);
      filtered(a, b) = B(a, b) / (s2 + mu);
    }
  return CgptMatrix(K, svd.matrixV() * filtered * svd.matrixV().transpose());
}

double leading_orders_error(const CgptMatrix& estimate, const CgptMatrix& truth, int orders) {
  const int k = std::min({orders, estimate.K, truth.K});
  const Eigen::MatrixXd diff =
      estimate.m.topLeftCorner(2 * k, 2 * k) - truth.m.topLeftCorner(2 * k, 2 * k);
  return diff.norm() / truth.m.topLeftCorner(2 * k, 2 * k).norm();
}

MuSelection select_mu(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                      const CgptMatrix& M_true, const RegularizationGrid& grid) {
  if (grid.mu.empty()) throw std::invalid_argument("select_mu: empty grid");
  MuSelection best;
  best.error = std::numeric_limits<double>::infinity();
  for (double mu : grid.mu) {
    const CgptMatrix M = solve_tikhonov(V, geom, K, mu);
    const double err = leading_orders_error(M, M_true);
    if (err < best.error) {
      best.mu = mu;
      best.error = err;
    }
  }
  return best;
}

double dirichlet_kernel(int K, double theta) {
  const double r = std::remainder(theta, kTwoPi);
  if (std::abs(r) < 1e-9) return 2.0 * K + 1.0;
  return std::sin((K + 0.5) * r) / std::sin(0.5 * r);
}

double interpolation_kernel(const std::vector<double>& angles, int s, double theta) {
  const int N = static_cast<int>(angles.size());
  if (s < 0 || s >= N) throw std::invalid_argument("interpolation_kernel: bad node index");
  double value = (N % 2 == 0) ? std::cos(0.5 * (theta - angles[s])) : 1.0;
  for (int t = 0; t < N; ++t) {
    if (t == s) continue;
    const double denom = std::sin(0.5 * (angles[s] - angles[t]));
    if (std::abs(denom) < 1e-12)
      throw std::invalid_argument("interpolation_kernel: coincident receiver angles");
    value *= std::sin(0.5 * (theta - angles[t])) / denom;
  }
  return value;
}

Eigen::MatrixXd left_inverse(const std::vector<double>& angles, int K) {
  const int N = static_cast<int>(angles.size());
  if (K < 1) throw std::invalid_argument("left_inverse: order must be >= 1");
  if (N <= 2 * K) throw std::invalid_argument("left_inverse: requires N > 2K");
  check_distinct(angles);

  const int nodes = 2 * (N + 2 * K) + 1;
  const double weight = 2.0 / nodes;  // (1/pi) * (2*pi / nodes)
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * K, N);
  for (int j = 1; j <= nodes; ++j) {
    const double th = kTwoPi * j / nodes;
    for (int s = 0; s < N; ++s) {
      const double h = interpolation_kernel(angles, s, th);
      for (int k = 1; k <= K; ++k) {
        out(2 * k - 2, s) += weight * h * std::cos(k * th);
        out(2 * k - 1, s) += weight * h * std::sin(k * th);
      }
    }
  }
  return out;
}

Eigen::MatrixXd left_inverse_odd_sum(const std::vector<double>& angles, int K) {
  const int N = static_cast<int>(angles.size());
  if (N % 2 == 0) throw std::invalid_argument("left_inverse_odd_sum: N must be odd");
  if (N <= 2 * K) throw std::invalid_argument("left_inverse_odd_sum: requires N > 2K");
  check_distinct(angles);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * K, N);
  for (int n = 1; n <= N; ++n) {
    const double th = kTwoPi * n / N;
    for (int s = 0; s < N; ++s) {
      const double h = interpolation_kernel(angles, s, th);
      for (int k = 1; k <= K; ++k) {
        out(2 * k - 2, s) += (2.0 / N) * h * std::cos(k * th);
        out(2 * k - 1, s) += (2.0 / N) * h * std::sin(k * th);
      }
    }
  }
  return out;
}

CgptMatrix noiseless_inversion(const MsrMatrix& V, const AcquisitionGeometry& geom, int K) {
  if (V.N != geom.N)
    throw std::invalid_argument("noiseless_inversion: V does not match geometry");
  const Eigen::MatrixXd lift = left_inverse(geom.theta, K);
  const Eigen::VectorXd dinv = scaling_diagonal(geom.rho(), K).cwiseInverse();
  return CgptMatrix(K,
                    dinv.asDiagonal() * (lift * V.v * lift.transpose()) * dinv.asDiagonal());
}

}  // namespace cgpt
