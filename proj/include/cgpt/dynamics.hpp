#pragma once

#include "cgpt/algebra.hpp"
#include "cgpt/rng.hpp"
#include "cgpt/types.hpp"

#include <cstdint>

namespace cgpt {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;

/// Conductivity kappa (> 0, != 1) and the derived contrast
/// lambda = (kappa + 1) / (2 kappa - 2), which always satisfies |lambda| > 1/2.
struct MaterialParams {
  double kappa = 2.0;

  explicit MaterialParams(double k) : kappa(k) {
    if (!(k > 0.0) || k == 1.0)
      throw std::invalid_argument("material: kappa must be positive and != 1");
  }

  double contrast() const { return (kappa + 1.0) / (2.0 * kappa - 2.0); }
  /// Multipole response factor (kappa - 1) / (kappa + 1) of a disk.
  double polarization_factor() const { return (kappa - 1.0) / (kappa + 1.0); }
};

/// White-noise-acceleration motion: sigma_a drives velocity, sigma_theta the
/// orientation random walk, dtau is the sampling step.
struct MotionModel {
  double sigma_a = 2.0;
  double sigma_theta = 0.5;
  double dtau = 0.01;
};

/// Kinematic state (velocity, position, orientation); the state vector
/// ordering is (vx, vy, x, y, theta) everywhere.
struct TargetState {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  double theta = 0.0;

  TargetState() = default;
  TargetState(double vx, double vy, double x, double y, double angle)
      : v(vx, vy), z(x, y), theta(angle) {}

  Vector5d vec() const {
    Vector5d out;
    out << v.x(), v.y(), z.x(), z.y(), theta;
    return out;
  }
  static TargetState from_vec(const Vector5d& s) {
    return TargetState(s(0), s(1), s(2), s(3), s(4));
  }
  RigidMotion motion() const { return RigidMotion(z.x(), z.y(), theta); }
};

/// Relative measurement-noise level p and the RNG seed of the run.
struct NoiseSpec {
  double level = 0.0;
  std::uint64_t seed = 0;

  NoiseSpec(double p, std::uint64_t s) : level(p), seed(s) {
    if (p < 0.0) throw std::invalid_argument("noise: level must be >= 0");
  }
};

/// Analytic CGPT of a disk: diagonal blocks
/// cc_mm = ss_mm = 2 pi m r^(2m) (kappa - 1)/(kappa + 1), everything else 0.
CgptMatrix disk_cgpt(double radius, const MaterialParams& material, int K);

/// State transition [[I2, 0, 0], [dtau*I2, I2, 0], [0, 0, 1]] in
/// (v, z, theta) ordering.
Matrix5d transition_matrix(const MotionModel& model);

/// Process-noise covariance of the integrated Brownian motion:
///   Sigma = dtau * [[sa^2 I2,        sa^2 dtau/2 I2,   0 ],
///                   [sa^2 dtau/2 I2, sa^2 dtau^2/3 I2, 0 ],
///                   [0,              0,                st^2]].
Matrix5d process_covariance(const MotionModel& model);

/// Closed-form lower-triangular factor L with L L^T = process_covariance;
/// well-defined also for vanishing noise scales.
Matrix5d process_noise_factor(const MotionModel& model);

/// Sampled path X_t = F X_{t-1} + U_t, U_t ~ N(0, Sigma) jointly over the
/// correlated velocity/position increments. Returns steps + 1 states
/// starting with X0; deterministic for a given seed ("trajectory" stream).
std::vector<TargetState> simulate_trajectory(const MotionModel& model, const TargetState& X0,
                                             int steps, const NoiseSpec& noise);

/// MSR frames plus the per-frame noise standard deviation actually applied.
struct MsrStream {
  std::vector<MsrMatrix> frames;
  std::vector<double> noise_std;

  double mean_noise_std() const;
};

/// Measurement stream V_t = L(T_t(M_D)) + W_t with W_t i.i.d. Gaussian of
/// per-frame std p * ||V_t_clean||_F / N ("msr-noise" stream). K_data = 0
/// uses the full order of M_D; smaller values restrict to the leading
/// orders. Throws ContainmentError (with the frame index) if any state puts
/// the target outside the ring: |z_t| + delta < R is required.
MsrStream generate_msr_stream(const CgptMatrix& M_D, const std::vector<TargetState>& states,
                              const AcquisitionGeometry& geom, const NoiseSpec& noise,
                              int K_data = 0);

}  // namespace cgpt
