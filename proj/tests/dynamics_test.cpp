#include "cgpt/dynamics.hpp"

#include "cgpt/acquisition.hpp"
#include "cgpt/reconstruct.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace cgpt;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("material parameters") {
  const MaterialParams mat(5.0);
  CHECK(mat.contrast() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(std::abs(mat.contrast()) > 0.5);
  const MaterialParams insulating(0.25);
  CHECK(insulating.contrast() < -0.5);
  CHECK_THROWS_AS(MaterialParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(MaterialParams(-2.0), std::invalid_argument);
}

TEST_CASE("disk CGPT") {
  SUBCASE("order-1 trace is the classical polarization tensor") {
    const double r = 1.7, kappa = 3.0;
    const CgptMatrix M = disk_cgpt(r, MaterialParams(kappa), 3);
    const double want = 2.0 * kTwoPi * r * r * (kappa - 1) / (kappa + 1);
    CHECK(M.block(0, 0).trace() == doctest::Approx(want).epsilon(1e-14));
    CHECK(M.is_symmetric());
  }
  SUBCASE("contrast vanishing with kappa -> 1") {
    const CgptMatrix M = disk_cgpt(1.0, MaterialParams(1.0 + 1e-12), 4);
    CHECK(M.m.cwiseAbs().maxCoeff() < 4 * kTwoPi * 1e-12);
  }
  SUBCASE("matches the separation-of-variables multipole response") {
    // Incident r^m cos(m theta) on a disk of radius r produces the exterior
    // perturbation -(kappa-1)/(kappa+1) r^(2m) r_x^-m cos(m theta_x), which
    // summed over the source expansion gives the MSR entries below. The
    // geometry uses delta = 1 so that the scaling matrix carries 1/R^k.
    const double r = 1.3, kappa = 3.0, R = 3.0;
    const int N = 16, K = 6;
    const auto geom = AcquisitionGeometry::uniform(N, R, 1.0, kTwoPi);
    const MsrMatrix got = apply_forward(disk_cgpt(r, MaterialParams(kappa), K), geom);
    const double c = (kappa - 1) / (kappa + 1);
    for (int s = 0; s < N; ++s)
      for (int rr = 0; rr < N; ++rr) {
        double want = 0.0;
        for (int m = 1; m <= K; ++m)
          want += c * std::pow(r, 2 * m) / (kTwoPi * m * std::pow(R, 2 * m)) *
                  std::cos(m * (geom.theta[s] - geom.theta[rr]));
        CHECK(got.v(s, rr) == doctest::Approx(want).epsilon(1e-12));
      }
  }
  SUBCASE("rejects non-positive radius") {
    CHECK_THROWS_AS(disk_cgpt(0.0, MaterialParams(2.0), 2), std::invalid_argument);
  }
}

TEST_CASE("state transition matrix") {
  SUBCASE("zero step gives the identity") {
    MotionModel still;
    still.dtau = 0.0;
    CHECK(test::max_abs_diff(transition_matrix(still), Matrix5d::Identity()) == 0.0);
  }
  SUBCASE("position integrates velocity") {
    MotionModel model;
    model.dtau = 0.01;
    const TargetState X(2.0, -1.0, 4.0, 3.0, 0.5);
    const Vector5d next = transition_matrix(model) * X.vec();
    CHECK(next(2) == doctest::Approx(4.0 + 0.01 * 2.0));
    CHECK(next(3) == doctest::Approx(3.0 - 0.01 * 1.0));
    CHECK(next(0) == doctest::Approx(2.0));
    CHECK(next(4) == doctest::Approx(0.5));
  }
  SUBCASE("unit determinant") {
    MotionModel model;
    CHECK(transition_matrix(model).determinant() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("process covariance") {
  MotionModel model;
  model.sigma_a = 2.0;
  model.sigma_theta = 0.5;
  model.dtau = 0.01;
  const Matrix5d S = process_covariance(model);

  CHECK(S(0, 0) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(S(4, 4) == doctest::Approx(0.0025).epsilon(1e-14));
  CHECK(S(0, 2) == doctest::Approx(4.0 * 0.01 * 0.01 / 2).epsilon(1e-14));
  CHECK(test::max_abs_diff(S, S.transpose()) == 0.0);

  SUBCASE("closed-form factor reproduces the covariance") {
    const Matrix5d L = process_noise_factor(model);
    CHECK(test::max_abs_diff(L * L.transpose(), S) < 1e-16);
  }
  SUBCASE("Cholesky factorization exists") {
    Eigen::LLT<Matrix5d> llt(S);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("trajectory simulation") {
  MotionModel model;
  const TargetState X0(-1.0, 1.0, 5.0, -5.0, 3 * kPi / 2);

  SUBCASE("zero noise gives straight-line motion") {
    MotionModel still = model;
    still.sigma_a = 0.0;
    still.sigma_theta = 0.0;
    const auto path = simulate_trajectory(still, X0, 100, NoiseSpec(0.0, 1));
    REQUIRE(path.size() == 101);
    for (int t = 0; t <= 100; ++t) {
      CHECK(path[t].z.x() == doctest::Approx(5.0 - t * 0.01).epsilon(1e-12));
      CHECK(path[t].z.y() == doctest::Approx(-5.0 + t * 0.01).epsilon(1e-12));
      CHECK(path[t].theta == doctest::Approx(3 * kPi / 2));
    }
  }
  SUBCASE("same seed reproduces the path, different seed does not") {
    const auto a = simulate_trajectory(model, X0, 50, NoiseSpec(0.0, 9));
    const auto b = simulate_trajectory(model, X0, 50, NoiseSpec(0.0, 9));
    const auto c = simulate_trajectory(model, X0, 50, NoiseSpec(0.0, 10));
    for (int t = 0; t <= 50; ++t) CHECK((a[t].vec() - b[t].vec()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a[50].vec() - c[50].vec()).cwiseAbs().maxCoeff() > 0.0);
  }
  SUBCASE("sampled increments match the model covariance within 5%") {
    const int steps = 100000;
    const auto path = simulate_trajectory(model, X0, steps, NoiseSpec(0.0, 123));
    const Matrix5d F = transition_matrix(model);
    const Matrix5d S = process_covariance(model);

    Matrix5d acc = Matrix5d::Zero();
    for (int t = 1; t <= steps; ++t) {
      const Vector5d u = path[t].vec() - F * path[t - 1].vec();
      acc += u * u.transpose();
    }
    acc /= steps;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const double scale = std::sqrt(S(i, i) * S(j, j));
        CHECK(std::abs(acc(i, j) - S(i, j)) < 0.05 * scale);
      }
    // velocity increments and orientation steps have the advertised stds
    CHECK(std::sqrt(acc(0, 0)) ==
          doctest::Approx(model.sigma_a * std::sqrt(model.dtau)).epsilon(0.05));
    CHECK(std::sqrt(acc(4, 4)) ==
          doctest::Approx(model.sigma_theta * std::sqrt(model.dtau)).epsilon(0.05));
  }
}

TEST_CASE("MSR stream generation") {
  const auto geom = AcquisitionGeometry::uniform(20, 10.0, 1.0, kTwoPi);
  const MaterialParams mat(5.0);
  const CgptMatrix disk = disk_cgpt(1.0, mat, 5);

  SUBCASE("static noise-free stream repeats the clean response") {
    const std::vector<TargetState> states(8, TargetState());
    const MsrStream stream = generate_msr_stream(disk, states, geom, NoiseSpec(0.0, 1));
    REQUIRE(stream.frames.size() == 8);
    const MsrMatrix want = apply_forward(disk, geom);
    for (const auto& frame : stream.frames) CHECK(test::max_abs_diff(frame.v, want.v) == 0.0);
    CHECK(stream.mean_noise_std() == 0.0);
  }
  SUBCASE("relative noise level is honored") {
    const std::vector<TargetState> states(20, TargetState(0, 0, 1.5, -0.5, 0.7));
    const double p = 0.1;
    const MsrStream stream = generate_msr_stream(disk, states, geom, NoiseSpec(p, 3));
    const MsrStream clean = generate_msr_stream(disk, states, geom, NoiseSpec(0.0, 3));
    double rel_sum = 0.0;
    for (std::size_t t = 0; t < stream.frames.size(); ++t)
      rel_sum += (stream.frames[t].v - clean.frames[t].v).norm() / clean.frames[t].v.norm();
    CHECK(rel_sum / stream.frames.size() == doctest::Approx(p).epsilon(0.1));
  }
  SUBCASE("translated disk frame equals the transform route") {
    const TargetState X(0, 0, 2.0, -1.0, 0.4);
    const MsrStream stream = generate_msr_stream(disk, {X}, geom, NoiseSpec(0.0, 1));
    const MsrMatrix want = apply_forward(transform_cgpt(disk, X.motion()), geom);
    CHECK(test::max_abs_diff(stream.frames[0].v, want.v) < 1e-15);
  }
  SUBCASE("noise-free frames invert back to the moved CGPT") {
    const auto odd_geom = AcquisitionGeometry::uniform(21, 10.0, 1.0, kTwoPi);
    const CgptMatrix base = disk_cgpt(1.0, mat, 3);
    const TargetState X(0, 0, 1.0, 0.5, 1.1);
    const MsrStream stream = generate_msr_stream(base, {X}, odd_geom, NoiseSpec(0.0, 1));
    const CgptMatrix rec = noiseless_inversion(stream.frames[0], odd_geom, 3);
    const CgptMatrix want = transform_cgpt(base, X.motion());
    CHECK(test::max_abs_diff(rec.m, want.m) < 1e-8 * (1.0 + want.m.cwiseAbs().maxCoeff()));
  }
  SUBCASE("containment is enforced with the frame index") {
    std::vector<TargetState> states(3, TargetState());
    states[2].z = Eigen::Vector2d(9.5, 0.0);  // |z| + delta >= R
    try {
      generate_msr_stream(disk, states, geom, NoiseSpec(0.0, 1));
      FAIL("expected ContainmentError");
    } catch (const ContainmentError& e) {
      CHECK(e.frame() == 2);
    }
  }
  SUBCASE("stream restricted to lower data order") {
    const MsrStream full = generate_msr_stream(disk, {TargetState()}, geom, NoiseSpec(0.0, 1), 5);
    const MsrStream low = generate_msr_stream(disk, {TargetState()}, geom, NoiseSpec(0.0, 1), 2);
    const MsrMatrix want = apply_forward(disk.leading(2), geom);
    CHECK(test::max_abs_diff(low.frames[0].v, want.v) == 0.0);
    CHECK(test::max_abs_diff(full.frames[0].v, low.frames[0].v) > 0.0);
  }
}
