#include "cgpt/tracker.hpp"

#include "cgpt/acquisition.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace cgpt {

namespace {

void check_containment(const TargetState& X, const AcquisitionGeometry& geom) {
  if (X.z.norm() + geom.delta >= geom.R)
    throw ContainmentError("observation undefined: target outside the measurement ring");
}

Matrix5d symmetrized(const Matrix5d& P) { return 0.5 * (P + P.transpose()); }

}  // namespace

Eigen::VectorXd observe(const TargetState& X, const ObservationModel& model) {
  check_containment(X, model.geom);
  return vec_rowmajor(apply_forward(transform_cgpt(model.M_D, X.motion()), model.geom).v);
}

Eigen::MatrixXd observe_jacobian(const TargetState& X, const ObservationModel& model) {
  check_containment(X, model.geom);
  const TransformPartials parts = transform_partials(model.M_D, X.motion());
  const int n2 = model.geom.N * model.geom.N;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n2, 5);
  H.col(2) = vec_rowmajor(apply_forward(parts.dx, model.geom).v);
  H.col(3) = vec_rowmajor(apply_forward(parts.dy, model.geom).v);
  H.col(4) = vec_rowmajor(apply_forward(parts.dtheta, model.geom).v);
  return H;
}

GaussianBelief kf_step(const GaussianBelief& belief, const Matrix5d& F, const Matrix5d& Q,
                       const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                       const Eigen::VectorXd& y) {
  if (H.cols() != 5 || H.rows() != y.size() || R.rows() != y.size() || R.cols() != y.size())
    throw std::invalid_argument("kf_step: inconsistent dimensions");

  const Vector5d x_pred = F * belief.mean;
  const Matrix5d P_pred = symmetrized(F * belief.cov * F.transpose() + Q);

  const Eigen::MatrixXd S = H * P_pred * H.transpose() + R;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  const double pivot_max = ldlt.vectorD().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= pivot_max * 1e-13)
    throw std::runtime_error("kf_step: singular innovation covariance");

  const Eigen::VectorXd innovation = y - H * x_pred;
  const Eigen::MatrixXd gain = P_pred * H.transpose() * ldlt.solve(
                                   Eigen::MatrixXd::Identity(S.rows(), S.cols()));
  GaussianBelief out;
  out.mean = x_pred + gain * innovation;
  out.cov = symmetrized((Matrix5d::Identity() - gain * H) * P_pred);
  return out;
}

GaussianBelief ekf_update(const GaussianBelief& predicted, const Eigen::VectorXd& innovation,
                          const Eigen::MatrixXd& H, double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("ekf_update: noise_var must be positive");
  const Eigen::LLT<Matrix5d> prior(predicted.cov);
  if (prior.info() != Eigen::Success)
    throw std::runtime_error("ekf_update: predicted covariance is not positive definite");

  const Matrix5d info = prior.solve(Matrix5d::Identity()) +
                        (H.transpose() * H) / noise_var;
  const Eigen::LLT<Matrix5d> post(symmetrized(info));
  if (post.info() != Eigen::Success)
    throw std::runtime_error("ekf_update: information matrix is not positive definite");

  GaussianBelief out;
  out.cov = symmetrized(post.solve(Matrix5d::Identity()));
  out.mean = predicted.mean + out.cov * (H.transpose() * innovation) / noise_var;
  return out;
}

EkfStepResult ekf_step(const GaussianBelief& belief, const Matrix5d& F, const Matrix5d& Q,
                       const ObservationModel& model, const MsrMatrix& V) {
  if (V.N != model.geom.N) throw std::invalid_argument("ekf_step: frame does not match geometry");

  GaussianBelief predicted;
  predicted.mean = F * belief.mean;
  predicted.cov = symmetrized(F * belief.cov * F.transpose() + Q);

  EkfStepResult result;
  const double limit = model.geom.R - model.geom.delta;
  const double radius = predicted.mean.segment<2>(2).norm();
  if (radius >= limit) {
    // Keep the filter alive: pull the predicted position back inside.
    predicted.mean.segment<2>(2) *= (limit - 1e-6 * model.geom.R) / radius;
    result.clamped = true;
  }

  const TargetState at = TargetState::from_vec(predicted.mean);
  const Eigen::VectorXd innovation = vec_rowmajor(V.v) - observe(at, model);
  const Eigen::MatrixXd H = observe_jacobian(at, model);
  result.belief = ekf_update(predicted, innovation, H, model.noise_std * model.noise_std);
  return result;
}

TrackerRun run_tracker(const std::vector<MsrMatrix>& stream, const ObservationModel& model,
                       const MotionModel& motion, const GaussianBelief& init,
                       const std::vector<double>& noise_std) {
  if (stream.empty()) throw std::invalid_argument("run_tracker: empty stream");
  if (!noise_std.empty() && noise_std.size() != stream.size())
    throw std::invalid_argument("run_tracker: per-frame noise list does not match the stream");
  const Matrix5d F = transition_matrix(motion);
  const Matrix5d Q = process_covariance(motion);

  TrackerRun run;
  run.beliefs.reserve(stream.size());
  GaussianBelief belief = init;
  ObservationModel frame_model = model;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    try {
      frame_model.noise_std = (!noise_std.empty() && noise_std[t] > 0.0) ? noise_std[t]
                                                                         : model.noise_std;
      EkfStepResult step = ekf_step(belief, F, Q, frame_model, stream[t]);
      belief = step.belief;
      if (step.clamped) run.clamped_frames.push_back(static_cast<int>(t));
    } catch (const std::exception& e) {
      throw std::runtime_error("tracker failed at frame " + std::to_string(t) + ": " + e.what());
    }
    run.beliefs.push_back(belief);
  }
  return run;
}

}  // namespace cgpt
