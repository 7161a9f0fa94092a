#pragma once

#include "cgpt/types.hpp"

#include <complex>

namespace cgpt {

/// Complex K x K recombinations N1, N2 of a CGPT matrix; they transform
/// multiplicatively under rigid motions of the target.
struct ComplexCgpt {
  int K = 0;
  Eigen::MatrixXcd N1;
  Eigen::MatrixXcd N2;
};

/// Rigid displacement in the plane plus a rotation about the target center.
struct RigidMotion {
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  double theta = 0.0;

  RigidMotion() = default;
  RigidMotion(double x, double y, double angle) : z(x, y), theta(angle) {}

  std::complex<double> displacement() const { return {z.x(), z.y()}; }

  /// Motion equivalent to applying *this first and `next` second.
  RigidMotion then(const RigidMotion& next) const;
};

/// Blockwise recombination N1_mn = (cc - ss) + i(cs + sc),
/// N2_mn = (cc + ss) + i(cs - sc).
ComplexCgpt to_complex(const CgptMatrix& M);

/// Exact inverse of to_complex.
CgptMatrix from_complex(const ComplexCgpt& nc);

/// Upper-triangular K x K motion matrix with entries
/// binom(n, m) (x + iy)^(n-m) e^(i m theta); the diagonal uses z^0 = 1.
Eigen::MatrixXcd motion_matrix(const RigidMotion& motion, int K);

struct MotionMatrixPartials {
  Eigen::MatrixXcd dx, dy, dtheta;
};

/// Entrywise derivatives of the motion matrix: the (m, n) entry of dx is
/// binom(n, m)(n-m) z^(n-m-1) e^(i m theta) (zero on the diagonal),
/// dy = i * dx, and dtheta multiplies each entry by i*m.
MotionMatrixPartials motion_matrix_partials(const RigidMotion& motion, int K);

/// CGPT of the rigidly moved target: the complex recombinations satisfy
/// N1' = F^T N1 F and N2' = F^H N2 F.
CgptMatrix transform_cgpt(const CgptMatrix& M, const RigidMotion& motion);

struct TransformPartials {
  CgptMatrix dx, dy, dtheta;
};

/// Analytic partial derivatives of transform_cgpt with respect to the
/// displacement components and the rotation angle.
TransformPartials transform_partials(const CgptMatrix& M, const RigidMotion& motion);

struct MotionIncrement {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;  // principal value in (-pi, pi]
};

/// Closed-form motion increment between two consecutive complex CGPTs from
/// the first-order relations on the (1,1) and (1,2) entries. Throws
/// DegenerateRatiosError when the relations are not solvable (e.g. disks,
/// where N1 vanishes identically); callers should then rely on the filter.
MotionIncrement first_order_estimate(const ComplexCgpt& prev, const ComplexCgpt& cur);

/// binom(n, k) as a double (exact for the orders used here).
double binomial(int n, int k);

}  // namespace cgpt
