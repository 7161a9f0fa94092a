#pragma once

#include "cgpt/dynamics.hpp"
#include "cgpt/types.hpp"

namespace cgpt {

/// Gaussian filter state over (vx, vy, x, y, theta). The covariance is
/// re-symmetrized after every update and stays numerically PSD.
struct GaussianBelief {
  Vector5d mean = Vector5d::Zero();
  Matrix5d cov = Matrix5d::Identity();
};

/// Nonlinear CGPT observation: h(X) = vec(L(T_{z,theta}(M_D))) with
/// additive white noise of standard deviation noise_std (R = noise_std^2 I).
struct ObservationModel {
  CgptMatrix M_D;
  AcquisitionGeometry geom;
  double noise_std = 1.0;

  ObservationModel(CgptMatrix target, AcquisitionGeometry geometry, double sigma)
      : M_D(std::move(target)), geom(std::move(geometry)), noise_std(sigma) {
    if (geom.N < 2 * M_D.K)
      throw std::invalid_argument("observation model: need N >= 2 * K_track");
    if (!(sigma > 0.0))
      throw std::invalid_argument("observation model: noise_std must be positive");
  }
};

/// Row-major vectorized clean MSR response at the given state; independent
/// of the velocity components. Throws ContainmentError outside the ring.
Eigen::VectorXd observe(const TargetState& X, const ObservationModel& model);

/// N^2 x 5 Jacobian of observe: velocity columns are identically zero and
/// the (x, y, theta) columns are vec(L(dT/dx)), vec(L(dT/dy)),
/// vec(L(dT/dtheta)).
Eigen::MatrixXd observe_jacobian(const TargetState& X, const ObservationModel& model);

/// Textbook linear Kalman step: predict x <- F x, P <- F P F^T + Q, then
/// update with gain K = P H^T (H P H^T + R)^-1. Throws on a numerically
/// singular innovation covariance.
GaussianBelief kf_step(const GaussianBelief& belief, const Matrix5d& F, const Matrix5d& Q,
                       const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                       const Eigen::VectorXd& y);

/// Measurement update in information form for R = noise_var * I:
///   P+ = (P^-1 + H^T H / noise_var)^-1,
///   x+ = x + P+ H^T innovation / noise_var.
/// Algebraically identical to the textbook update for positive-definite P;
/// costs O(dim^3) in the state dimension instead of the observation size.
GaussianBelief ekf_update(const GaussianBelief& predicted, const Eigen::VectorXd& innovation,
                          const Eigen::MatrixXd& H, double noise_var);

struct EkfStepResult {
  GaussianBelief belief;
  bool clamped = false;  // predicted position was pulled back inside the ring
};

/// One extended Kalman step against a measured MSR frame: linear predict,
/// innovation against observe at the predicted mean, Jacobian-based update.
/// A predicted mean outside the ring is clamped to radius R - delta - eps
/// and flagged instead of aborting the filter.
EkfStepResult ekf_step(const GaussianBelief& belief, const Matrix5d& F, const Matrix5d& Q,
                       const ObservationModel& model, const MsrMatrix& V);

struct TrackerRun {
  std::vector<GaussianBelief> beliefs;  // one posterior per frame
  std::vector<int> clamped_frames;
};

/// Folds ekf_step over the stream; deterministic. Each frame triggers one
/// predict + update, so `init` is the belief at the epoch *before* the
/// first frame (a frame measured at the initial epoch itself must not be
/// passed in). When `noise_std` is non-empty it supplies the per-frame
/// measurement std (R_t = sigma_t^2 I, assumed known); entries <= 0 fall
/// back to the model's constant. Step failures are rethrown with the
/// offending frame index.
TrackerRun run_tracker(const std::vector<MsrMatrix>& stream, const ObservationModel& model,
                       const MotionModel& motion, const GaussianBelief& init,
                       const std::vector<double>& noise_std = {});

}  // namespace cgpt
