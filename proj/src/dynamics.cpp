#include "cgpt/dynamics.hpp"

#include "cgpt/acquisition.hpp"

#include <cmath>

namespace cgpt {

CgptMatrix disk_cgpt(double radius, const MaterialParams& material, int K) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk_cgpt: radius must be positive");
  CgptMatrix M(K);
  const double factor = material.polarization_factor();
  for (int m = 1; m <= K; ++m) {
    const double value = kTwoPi * m * std::pow(radius, 2 * m) * factor;
    M.m(2 * m - 2, 2 * m - 2) = value;
    M.m(2 * m - 1, 2 * m - 1) = value;
  }
  return M;
}

Matrix5d transition_matrix(const MotionModel& model) {
  Matrix5d F = Matrix5d::Identity();
  F(2, 0) = model.dtau;
  F(3, 1) = model.dtau;
  return F;
}

Matrix5d process_covariance(const MotionModel& model) {
  const double sa2 = model.sigma_a * model.sigma_a;
  const double dt = model.dtau;
  Matrix5d S = Matrix5d::Zero();
  S(0, 0) = S(1, 1) = sa2 * dt;
  S(2, 0) = S(0, 2) = S(3, 1) = S(1, 3) = sa2 * dt * dt / 2.0;
  S(2, 2) = S(3, 3) = sa2 * dt * dt * dt / 3.0;
  S(4, 4) = model.sigma_theta * model.sigma_theta * dt;
  return S;
}

Matrix5d process_noise_factor(const MotionModel& model) {
  const double rt = std::sqrt(model.dtau);
  const double a = model.sigma_a * rt;              // velocity scale
  const double b = model.sigma_a * rt * model.dtau;  // position scale
  Matrix5d L = Matrix5d::Zero();
  L(0, 0) = L(1, 1) = a;
  L(2, 0) = L(3, 1) = b / 2.0;
  L(2, 2) = L(3, 3) = b / (2.0 * std::sqrt(3.0));
  L(4, 4) = model.sigma_theta * rt;
  return L;
}

std::vector<TargetState> simulate_trajectory(const MotionModel& model, const TargetState& X0,
                                             int steps, const NoiseSpec& noise) {
  if (steps < 1) throw std::invalid_argument("simulate_trajectory: steps must be >= 1");
  const Matrix5d F = transition_matrix(model);
  const Matrix5d L = process_noise_factor(model);
  Rng rng = Rng(noise.seed).substream("trajectory");

  std::vector<TargetState> path;
  path.reserve(steps + 1);
  path.push_back(X0);
  Vector5d x = X0.vec();
  for (int t = 1; t <= steps; ++t) {
    Vector5d xi;
    for (int i = 0; i < 5; ++i) xi(i) = rng.gaussian();
    x = F * x + L * xi;
    path.push_back(TargetState::from_vec(x));
  }
  return path;
}

double MsrStream::mean_noise_std() const {
  if (noise_std.empty()) return 0.0;
  double sum = 0.0;
  for (double s : noise_std) sum += s;
  return sum / noise_std.size();
}

MsrStream generate_msr_stream(const CgptMatrix& M_D, const std::vector<TargetState>& states,
                              const AcquisitionGeometry& geom, const NoiseSpec& noise,
                              int K_data) {
  if (states.empty()) throw std::invalid_argument("generate_msr_stream: no states");
  if (K_data == 0) K_data = M_D.K;
  if (K_data < 1 || K_data > M_D.K)
    throw std::invalid_argument("generate_msr_stream: K_data exceeds the order of M_D");
  const CgptMatrix base = (K_data == M_D.K) ? M_D : M_D.leading(K_data);

  Rng rng = Rng(noise.seed).substream("msr-noise");
  MsrStream stream;
  stream.frames.reserve(states.size());
  stream.noise_std.reserve(states.size());

  for (std::size_t t = 0; t < states.size(); ++t) {
    const TargetState& X = states[t];
    if (X.z.norm() + geom.delta >= geom.R)
      throw ContainmentError("target left the measurement ring at frame " + std::to_string(t),
                             static_cast<int>(t));
    MsrMatrix V = apply_forward(transform_cgpt(base, X.motion()), geom);
    const double sigma = noise.level * V.v.norm() / geom.N;
    // The unit draws are consumed for every frame so that runs at different
    // noise levels under the same seed see identical noise shapes.
    for (int i = 0; i < geom.N; ++i)
      for (int j = 0; j < geom.N; ++j) V.v(i, j) += sigma * rng.gaussian();
    stream.frames.push_back(std::move(V));
    stream.noise_std.push_back(sigma);
  }
  return stream;
}

}  // namespace cgpt
