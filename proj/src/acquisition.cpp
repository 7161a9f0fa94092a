#include "cgpt/acquisition.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace cgpt {

namespace {

void check_orders(int N, int K) {
  if (K < 1) throw std::invalid_argument("order K must be >= 1");
  if (N < 2 * K)
    throw std::invalid_argument("under-determined system: need N >= 2K, got N=" +
                                std::to_string(N) + ", K=" + std::to_string(K));
}

Eigen::MatrixXd scaled_coefficients(const AcquisitionGeometry& geom, int K) {
  return coefficient_matrix(geom, K) * scaling_diagonal(geom.rho(), K).asDiagonal();
}

double rank_tolerance(const Eigen::VectorXd& sv, int rows, int cols) {
  return sv(0) * std::max(rows, cols) * std::numeric_limits<double>::epsilon();
}

}  // namespace

AcquisitionGeometry AcquisitionGeometry::uniform(int N, double R, double delta, double gamma) {
  if (N < 1) throw std::invalid_argument("geometry: N must be >= 1");
  if (gamma <= 0.0 || gamma > kTwoPi + 1e-12)
    throw std::invalid_argument("geometry: aperture must lie in (0, 2*pi]");
  AcquisitionGeometry g;
  g.N = N;
  g.R = R;
  g.delta = delta;
  g.gamma = std::min(gamma, kTwoPi);
  g.theta.resize(N);
  for (int s = 1; s <= N; ++s) g.theta[s - 1] = *g.gamma * s / N;
  if (g.rho() <= 1.0) throw std::invalid_argument("geometry: rho = R/delta must exceed 1");
  return g;
}

AcquisitionGeometry AcquisitionGeometry::grouped(const std::vector<ReceiverGroup>& groups,
                                                 double R, double delta) {
  AcquisitionGeometry g;
  g.R = R;
  g.delta = delta;
  g.groups = groups;
  for (const auto& grp : groups) {
    if (grp.count < 1) throw std::invalid_argument("geometry: group count must be >= 1");
    if (grp.start < 0.0 || grp.span <= 0.0 || grp.start + grp.span > kTwoPi + 1e-12)
      throw std::invalid_argument("geometry: group arc must lie within [0, 2*pi]");
    for (int j = 1; j <= grp.count; ++j) g.theta.push_back(grp.start + grp.span * j / grp.count);
  }
  g.N = static_cast<int>(g.theta.size());
  std::sort(g.theta.begin(), g.theta.end());
  for (std::size_t i = 1; i < g.theta.size(); ++i)
    if (g.theta[i] - g.theta[i - 1] < 1e-12)
      throw std::invalid_argument("geometry: receiver angles must be distinct");
  if (g.rho() <= 1.0) throw std::invalid_argument("geometry: rho = R/delta must exceed 1");
  return g;
}

Eigen::MatrixXd coefficient_matrix(const AcquisitionGeometry& geom, int K) {
  check_orders(geom.N, K);
  Eigen::MatrixXd C(geom.N, 2 * K);
  for (int r = 0; r < geom.N; ++r) {
    const double th = geom.theta[r];
    for (int m = 1; m <= K; ++m) {
      C(r, 2 * m - 2) = std::cos(m * th);
      C(r, 2 * m - 1) = std::sin(m * th);
    }
  }
  return C;
}

Eigen::VectorXd scaling_diagonal(double rho, int K) {
  if (rho <= 1.0) throw std::invalid_argument("scaling: target not enclosed (rho <= 1)");
  if (K < 1) throw std::invalid_argument("order K must be >= 1");
  Eigen::VectorXd d(2 * K);
  for (int k = 1; k <= K; ++k) {
    const double v = 1.0 / (kTwoPi * k * std::pow(rho, k));
    d(2 * k - 2) = v;
    d(2 * k - 1) = v;
  }
  return d;
}

MsrMatrix apply_forward(const CgptMatrix& M, const AcquisitionGeometry& geom) {
  const Eigen::MatrixXd A = scaled_coefficients(geom, M.K);
  return MsrMatrix(geom.N, A * M.m * A.transpose());
}

CgptMatrix pinv_apply(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                      PinvInfo* info) {
  if (V.N != geom.N) throw std::invalid_argument("pinv_apply: V does not match geometry");
  const Eigen::MatrixXd A = scaled_coefficients(geom, K);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = rank_tolerance(sv, geom.N, 2 * K);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) {
      inv(i) = 1.0 / sv(i);
      ++rank;
    }
  if (info) {
    info->rank = rank;
    info->tolerance = tol;
    info->degenerate = rank < 2 * K;
  }
  const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return CgptMatrix(K, pinv * V.v * pinv.transpose());
}

CgptMatrix fullview_pinv(const MsrMatrix& V, const AcquisitionGeometry& geom, int K) {
  if (!geom.full_view())
    throw std::invalid_argument("fullview_pinv: geometry is not full view");
  if (V.N != geom.N) throw std::invalid_argument("fullview_pinv: V does not match geometry");
  check_orders(geom.N, K);
  const Eigen::MatrixXd C = coefficient_matrix(geom, K);
  const Eigen::VectorXd dinv = scaling_diagonal(geom.rho(), K).cwiseInverse();
  const double scale = 4.0 / (static_cast<double>(geom.N) * geom.N);
  return CgptMatrix(
      K, scale * (dinv.asDiagonal() * (C.transpose() * V.v * C) * dinv.asDiagonal()));
}

SpectrumReport fullview_singular_values(int N, double rho, int K) {
  check_orders(N, K);
  if (rho <= 1.0) throw std::invalid_argument("spectrum: rho must exceed 1");
  SpectrumReport rep;
  rep.singular_values.resize(4 * K * K);
  Eigen::Index i = 0;
  for (int a = 1; a <= 2 * K; ++a)
    for (int b = 1; b <= 2 * K; ++b) {
      const int ka = (a + 1) / 2, kb = (b + 1) / 2;
      rep.singular_values(i++) =
          N / (2.0 * kTwoPi * kTwoPi * ka * kb * std::pow(rho, ka + kb));
    }
  std::sort(rep.singular_values.data(), rep.singular_values.data() + rep.singular_values.size(),
            std::greater<double>());
  // Condition number K^2 rho^(2(K-1)), assembled in the log domain so large
  // K and rho cannot overflow intermediates.
  rep.log10_condition = 2.0 * std::log10(static_cast<double>(K)) + 2.0 * (K - 1) * std::log10(rho);
  rep.condition_number = std::pow(10.0, rep.log10_condition);
  return rep;
}

Eigen::VectorXd gram_eigenvalues(const AcquisitionGeometry& geom, int K, bool scaled) {
  const Eigen::MatrixXd A =
      scaled ? scaled_coefficients(geom, K) : coefficient_matrix(geom, K);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues().array().square();
}

SpectrumReport limitedview_spectrum(const AcquisitionGeometry& geom, int K) {
  const Eigen::MatrixXd A = scaled_coefficients(geom, K);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  Eigen::VectorXd sigma = svd.singularValues();
  // Working-precision cutoff for the 2K x 2K eigenproblem; deliberately not
  // the (N-proportional) pseudo-inverse tolerance, which would declare large
  // well-resolved arrays singular merely because N grew.
  const double tol = sigma(0) * 2 * K * std::numeric_limits<double>::epsilon();

  SpectrumReport rep;
  rep.numerically_singular = sigma(sigma.size() - 1) <= tol;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) <= tol) sigma(i) = 0.0;

  rep.singular_values.resize(4 * K * K);
  Eigen::Index i = 0;
  for (Eigen::Index a = 0; a < sigma.size(); ++a)
    for (Eigen::Index b = 0; b < sigma.size(); ++b)
      rep.singular_values(i++) = sigma(a) * sigma(b);
  std::sort(rep.singular_values.data(), rep.singular_values.data() + rep.singular_values.size(),
            std::greater<double>());

  const double smin = sigma(sigma.size() - 1);
  if (smin > 0.0) {
    rep.log10_condition = 2.0 * (std::log10(sigma(0)) - std::log10(smin));
    rep.condition_number = std::pow(10.0, rep.log10_condition);
  } else {
    rep.log10_condition = std::numeric_limits<double>::infinity();
    rep.condition_number = std::numeric_limits<double>::infinity();
  }

  rep.coefficient_condition = matrix_condition(coefficient_matrix(geom, K));
  rep.log10_condition_bound = 2.0 * std::log10(rep.coefficient_condition) +
                              2.0 * std::log10(static_cast<double>(K)) +
                              2.0 * (K - 1) * std::log10(geom.rho());
  return rep;
}

Eigen::MatrixXd assemble_operator(const AcquisitionGeometry& geom, int K) {
  const Eigen::MatrixXd A = scaled_coefficients(geom, K);
  const int N = geom.N, cols = 2 * K;
  Eigen::MatrixXd op(N * N, cols * cols);
  for (int s = 0; s < N; ++s)
    for (int r = 0; r < N; ++r)
      for (int a = 0; a < cols; ++a)
        for (int b = 0; b < cols; ++b) op(s * N + r, a * cols + b) = A(s, a) * A(r, b);
  return op;
}

double matrix_condition(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace cgpt
