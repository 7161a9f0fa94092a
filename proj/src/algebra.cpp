#include "cgpt/algebra.hpp"

#include <cmath>

namespace cgpt {

namespace {

using Complex = std::complex<double>;

Complex pow_int(Complex z, int k) {
  Complex out(1.0, 0.0);
  for (int i = 0; i < k; ++i) out *= z;
  return out;
}

CgptMatrix from_complex_parts(int K, const Eigen::MatrixXcd& n1, const Eigen::MatrixXcd& n2) {
  CgptMatrix out(K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      const Complex s = n1(a, b) + n2(a, b);
      const Complex d = n1(a, b) - n2(a, b);
      auto blk = out.block(a, b);
      blk(0, 0) = 0.5 * s.real();
      blk(0, 1) = 0.5 * s.imag();
      blk(1, 0) = 0.5 * d.imag();
      blk(1, 1) = -0.5 * d.real();
    }
  return out;
}

}  // namespace

RigidMotion RigidMotion::then(const RigidMotion& next) const {
  const Complex composed =
      next.displacement() + displacement() * std::exp(Complex(0.0, next.theta));
  return RigidMotion(composed.real(), composed.imag(), theta + next.theta);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

ComplexCgpt to_complex(const CgptMatrix& M) {
  ComplexCgpt nc;
  nc.K = M.K;
  nc.N1.resize(M.K, M.K);
  nc.N2.resize(M.K, M.K);
  for (int a = 0; a < M.K; ++a)
    for (int b = 0; b < M.K; ++b) {
      const auto blk = M.block(a, b);
      const double cc = blk(0, 0), cs = blk(0, 1), sc = blk(1, 0), ss = blk(1, 1);
      nc.N1(a, b) = Complex(cc - ss, cs + sc);
      nc.N2(a, b) = Complex(cc + ss, cs - sc);
    }
  return nc;
}

CgptMatrix from_complex(const ComplexCgpt& nc) {
  if (nc.N1.rows() != nc.K || nc.N2.rows() != nc.K)
    throw std::invalid_argument("from_complex: inconsistent order");
  return from_complex_parts(nc.K, nc.N1, nc.N2);
}

Eigen::MatrixXcd motion_matrix(const RigidMotion& motion, int K) {
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(K, K);
  const Complex z = motion.displacement();
  for (int m = 1; m <= K; ++m) {
    const Complex phase = std::exp(Complex(0.0, m * motion.theta));
    for (int n = m; n <= K; ++n)
      F(m - 1, n - 1) = binomial(n, m) * pow_int(z, n - m) * phase;
  }
  return F;
}

MotionMatrixPartials motion_matrix_partials(const RigidMotion& motion, int K) {
  MotionMatrixPartials p;
  p.dx = Eigen::MatrixXcd::Zero(K, K);
  p.dtheta = Eigen::MatrixXcd::Zero(K, K);
  const Complex z = motion.displacement();
  for (int m = 1; m <= K; ++m) {
    const Complex phase = std::exp(Complex(0.0, m * motion.theta));
    for (int n = m; n <= K; ++n) {
      // (n - m) z^(n-m-1), with the n = m term defined as 0.
      if (n > m) p.dx(m - 1, n - 1) = binomial(n, m) * double(n - m) * pow_int(z, n - m - 1) * phase;
      p.dtheta(m - 1, n - 1) =
          Complex(0.0, m) * binomial(n, m) * pow_int(z, n - m) * phase;
    }
  }
  p.dy = Complex(0.0, 1.0) * p.dx;
  return p;
}

CgptMatrix transform_cgpt(const CgptMatrix& M, const RigidMotion& motion) {
  const ComplexCgpt nc = to_complex(M);
  const Eigen::MatrixXcd F = motion_matrix(motion, M.K);
  return from_complex_parts(M.K, F.transpose() * nc.N1 * F, F.adjoint() * nc.N2 * F);
}

TransformPartials transform_partials(const CgptMatrix& M, const RigidMotion& motion) {
  const ComplexCgpt nc = to_complex(M);
  const Eigen::MatrixXcd F = motion_matrix(motion, M.K);
  const MotionMatrixPartials dF = motion_matrix_partials(motion, M.K);

  auto chain = [&](const Eigen::MatrixXcd& d) {
    Eigen::MatrixXcd n1 = d.transpose() * nc.N1 * F + F.transpose() * nc.N1 * d;
    Eigen::MatrixXcd n2 = d.adjoint() * nc.N2 * F + F.adjoint() * nc.N2 * d;
    return from_complex_parts(M.K, n1, n2);
  };

  TransformPartials out;
  out.dx = chain(dF.dx);
  out.dy = chain(dF.dy);
  out.dtheta = chain(dF.dtheta);
  return out;
}

MotionIncrement first_order_estimate(const ComplexCgpt& prev, const ComplexCgpt& cur) {
  if (prev.K < 2 || cur.K < 2)
    throw DegenerateRatiosError("first_order_estimate: needs CGPTs of order >= 2");

  auto ratios = [](const ComplexCgpt& nc, Complex& r1, Complex& r2) {
    const double scale1 = nc.N1.cwiseAbs().maxCoeff();
    const double scale2 = nc.N2.cwiseAbs().maxCoeff();
    if (scale1 <= 0.0 || std::abs(nc.N1(0, 0)) < 1e-12 * scale1)
      throw DegenerateRatiosError("first_order_estimate: N1(1,1) vanishes");
    if (scale2 <= 0.0 || std::abs(nc.N2(0, 0)) < 1e-12 * scale2)
      throw DegenerateRatiosError("first_order_estimate: N2(1,1) vanishes");
    r1 = nc.N1(0, 1) / nc.N1(0, 0);
    r2 = nc.N2(0, 1) / nc.N2(0, 0);
  };

  Complex r1p, r2p, r1c, r2c;
  ratios(prev, r1p, r2p);
  ratios(cur, r1c, r2c);

  const Complex dp = r1p - r2p;
  const Complex dc = r1c - r2c;
  if (std::abs(dp) < 1e-12 * (std::abs(r1p) + std::abs(r2p) + 1e-300))
    throw DegenerateRatiosError("first_order_estimate: ratio difference vanishes");

  MotionIncrement inc;
  inc.dtheta = std::arg(dc / dp);
  const Complex dz = 0.5 * (r1c - std::exp(Complex(0.0, inc.dtheta)) * r1p);
  inc.dx = dz.real();
  inc.dy = dz.imag();
  return inc;
}

}  // namespace cgpt
