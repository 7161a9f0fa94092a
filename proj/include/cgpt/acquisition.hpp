#pragma once

#include "cgpt/types.hpp"

namespace cgpt {

/// N x 2K coefficient matrix; row r holds the blocks
/// (cos(m*theta_r), sin(m*theta_r)) for m = 1..K.
/// Requires N >= 2K >= 2.
Eigen::MatrixXd coefficient_matrix(const AcquisitionGeometry& geom, int K);

/// Diagonal of the 2K x 2K scaling matrix: entries 2k-1 and 2k both equal
/// 1/(2*pi*k*rho^k). Requires rho > 1.
Eigen::VectorXd scaling_diagonal(double rho, int K);

/// Forward operator V = C D M D C^T mapping a CGPT matrix to the clean
/// multistatic response.
MsrMatrix apply_forward(const CgptMatrix& M, const AcquisitionGeometry& geom);

struct PinvInfo {
  int rank = 0;
  double tolerance = 0.0;
  bool degenerate = false;  // rank < 2K at the working tolerance
};

/// Minimal-Frobenius-norm solution of min ||L(M) - V||_F via the
/// pseudo-inverse A^+ V (A^+)^T with A = C D. Singular values below
/// max(sigma) * max(N, 2K) * eps are truncated.
CgptMatrix pinv_apply(const MsrMatrix& V, const AcquisitionGeometry& geom, int K,
                      PinvInfo* info = nullptr);

/// Closed-form full-view pseudo-inverse (4/N^2) D^-1 C^T V C D^-1.
/// Requires a uniform layout with gamma = 2*pi.
CgptMatrix fullview_pinv(const MsrMatrix& V, const AcquisitionGeometry& geom, int K);

/// Closed-form full-view spectrum: the (a,b)-th singular value of the
/// forward operator is N / (8 pi^2 ceil(a/2) ceil(b/2) rho^(ceil(a/2)+ceil(b/2)))
/// and the condition number is K^2 rho^(2(K-1)).
SpectrumReport fullview_singular_values(int N, double rho, int K);

/// Spectrum of the forward operator for an arbitrary layout: singular
/// values are sqrt(mu_a mu_b) over pairs of eigenvalues mu of D C^T C D.
/// Eigenvalues below the working tolerance are reported as zero with the
/// numerically_singular flag set.
SpectrumReport limitedview_spectrum(const AcquisitionGeometry& geom, int K);

/// Descending eigenvalues of C^T C (scaled = false) or D C^T C D
/// (scaled = true), computed as squared singular values.
Eigen::VectorXd gram_eigenvalues(const AcquisitionGeometry& geom, int K, bool scaled);

/// Dense N^2 x 4K^2 matrix of the forward operator under the row-major
/// vectorization convention (equals kron(A, A) with A = C D).
Eigen::MatrixXd assemble_operator(const AcquisitionGeometry& geom, int K);

/// Ratio of largest to smallest singular value.
double matrix_condition(const Eigen::MatrixXd& a);

}  // namespace cgpt
