#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgpt {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Target left the measurement ring (|z| + delta >= R).
class ContainmentError : public std::runtime_error {
 public:
  explicit ContainmentError(const std::string& what, int frame = -1)
      : std::runtime_error(what), frame_(frame) {}
  int frame() const { return frame_; }

 private:
  int frame_;
};

/// The first-order motion relations are not solvable for this pair of
/// complex CGPTs (vanishing leading coefficients or equal ratios).
class DegenerateRatiosError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file violates the schema or a module precondition.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// One contiguous arc of receivers: `count` receivers at
/// start + span*j/count for j = 1..count.
struct ReceiverGroup {
  double start = 0.0;
  double span = 0.0;
  int count = 0;
};

/// Ring of N coincident sources/receivers of radius R around the origin,
/// enclosing a target of characteristic scale delta (rho = R/delta > 1).
/// Receiver angles are strictly increasing and lie in (0, 2*pi].
struct AcquisitionGeometry {
  int N = 0;
  double R = 0.0;
  double delta = 1.0;
  std::vector<double> theta;
  std::optional<double> gamma;  // aperture, set for uniform layouts
  std::vector<ReceiverGroup> groups;

  double rho() const { return R / delta; }

  bool full_view() const {
    return gamma.has_value() && std::abs(*gamma - kTwoPi) < 1e-12;
  }

  /// Evenly spaced receivers over (0, gamma]: theta_s = gamma*s/N.
  static AcquisitionGeometry uniform(int N, double R, double delta, double gamma);

  /// Receivers split into arcs; total count must equal N and the
  /// resulting angles must be distinct.
  static AcquisitionGeometry grouped(const std::vector<ReceiverGroup>& groups,
                                     double R, double delta);
};

/// Real 2K x 2K matrix of contracted polarization tensors. Block (m, n)
/// (orders m, n = 1..K) occupies rows 2m-1..2m and columns 2n-1..2n and
/// holds the [[cc, cs], [sc, ss]] harmonic coefficients.
struct CgptMatrix {
  int K = 0;
  Eigen::MatrixXd m;

  CgptMatrix() = default;
  explicit CgptMatrix(int order) : K(order), m(Eigen::MatrixXd::Zero(2 * order, 2 * order)) {
    if (order < 1) throw std::invalid_argument("CgptMatrix: order must be >= 1");
  }
  CgptMatrix(int order, Eigen::MatrixXd values) : K(order), m(std::move(values)) {
    if (order < 1) throw std::invalid_argument("CgptMatrix: order must be >= 1");
    if (m.rows() != 2 * order || m.cols() != 2 * order)
      throw std::invalid_argument("CgptMatrix: values must be 2K x 2K");
    if (!m.allFinite()) throw std::invalid_argument("CgptMatrix: entries must be finite");
  }

  /// 2x2 harmonic block for orders (m0+1, n0+1); indices are 0-based.
  Eigen::Block<Eigen::MatrixXd, 2, 2> block(int m0, int n0) {
    return m.block<2, 2>(2 * m0, 2 * n0);
  }
  Eigen::Block<const Eigen::MatrixXd, 2, 2> block(int m0, int n0) const {
    return m.block<2, 2>(2 * m0, 2 * n0);
  }

  /// Restriction to the first K1 orders (leading 2K1 x 2K1 sub-matrix).
  CgptMatrix leading(int K1) const {
    if (K1 < 1 || K1 > K) throw std::invalid_argument("CgptMatrix::leading: bad order");
    return CgptMatrix(K1, m.topLeftCorner(2 * K1, 2 * K1));
  }

  bool is_symmetric(double rel_tol = 1e-12) const {
    double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
  }
};

/// N x N multistatic response matrix; entry (s, r) is the potential
/// perturbation V_sr between source s and receiver r.
struct MsrMatrix {
  int N = 0;
  Eigen::MatrixXd v;

  MsrMatrix() = default;
  explicit MsrMatrix(int n) : N(n), v(Eigen::MatrixXd::Zero(n, n)) {}
  MsrMatrix(int n, Eigen::MatrixXd values) : N(n), v(std::move(values)) {
    if (v.rows() != n || v.cols() != n)
      throw std::invalid_argument("MsrMatrix: values must be N x N");
    if (!v.allFinite()) throw std::invalid_argument("MsrMatrix: entries must be finite");
  }
};

/// Row-major vectorization (rows s = 1..N concatenated); fixed convention
/// shared by the assembled operator and the tracker observation.
inline Eigen::VectorXd vec_rowmajor(const Eigen::MatrixXd& a) {
  Eigen::VectorXd out(a.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(k++) = a(i, j);
  return out;
}

/// Spectrum of a (possibly ill-posed) linear operator: singular values in
/// descending order plus condition numbers kept in the log domain.
struct SpectrumReport {
  Eigen::VectorXd singular_values;
  double condition_number = std::numeric_limits<double>::quiet_NaN();
  double log10_condition = std::numeric_limits<double>::quiet_NaN();
  bool numerically_singular = false;
  // Limited-view extras: conditioning of the bare coefficient matrix and
  // the a-priori bound cond(C)^2 * K^2 * rho^(2K-2).
  double coefficient_condition = std::numeric_limits<double>::quiet_NaN();
  double log10_condition_bound = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace cgpt
