#include "cgpt/harness.hpp"

#include "cgpt/acquisition.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace cgpt;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cgpt_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

ExperimentConfig tiny_tracking_config(const std::string& out_dir) {
  ExperimentConfig cfg = default_config("track-fullview");
  cfg.out_dir = out_dir;
  cfg.steps = 5;
  cfg.seeds = {1};
  cfg.noise_levels = {0.1};
  cfg.target.scales = {10.0};
  return cfg;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  SUBCASE("minimal spectrum config fills the documented defaults") {
    const ExperimentConfig cfg = config_from_json(R"({"experiment":"spectrum"})");
    CHECK(cfg.geometry.N == 101);
    CHECK(cfg.K_data == 50);
    CHECK(cfg.geometry.R / cfg.geometry.delta == doctest::Approx(1.2));
    CHECK(cfg.gammas.size() == 4);
  }
  SUBCASE("tracking defaults follow the reference protocol") {
    const ExperimentConfig cfg = default_config("track-fullview");
    CHECK(cfg.geometry.N == 20);
    CHECK(cfg.motion.sigma_a == doctest::Approx(2.0));
    CHECK(cfg.motion.sigma_theta == doctest::Approx(0.5));
    CHECK(cfg.motion.dtau == doctest::Approx(0.01));
    CHECK(cfg.steps == 1000);
    CHECK(cfg.initial_state(4) == doctest::Approx(3 * kPi / 2));
    CHECK(cfg.initial_guess(2) == doctest::Approx(10.0));
    CHECK(cfg.initial_guess(3) == doctest::Approx(-0.5));
  }
  SUBCASE("missing file reports NotFound") {
    try {
      load_config("/nonexistent/config.json");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("NotFound") != std::string::npos);
    }
  }
  SUBCASE("module preconditions are enforced with a field path") {
    try {
      config_from_json(
          R"({"experiment":"track-fullview","geometry":{"N":10},"orders":{"K_track":6,"K_data":6}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "orders.K_data");
      CHECK(std::string(e.what()).find("N >= 2K") != std::string::npos);
    }
  }
  SUBCASE("unknown fields are rejected") {
    CHECK_THROWS_AS(config_from_json(R"({"experiment":"spectrum","tpyo":1})"), ConfigError);
  }
  SUBCASE("type errors carry the field path") {
    try {
      config_from_json(R"({"experiment":"spectrum","geometry":{"N":"many"}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "geometry.N");
    }
  }
  SUBCASE("serialization round-trips losslessly") {
    ExperimentConfig cfg = default_config("track-limited");
    cfg.seeds = {3, 9};
    cfg.noise_levels = {0.05, 0.2};
    cfg.kappa = 3.7;
    cfg.initial_state(2) = 4.123456789012345;
    const ExperimentConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(back.initial_state(2) == cfg.initial_state(2));
  }
  SUBCASE("unknown experiment id is a config error") {
    CHECK_THROWS_AS(config_from_json(R"({"experiment":"warp-drive"})"), ConfigError);
  }
}

TEST_CASE("grouped ring layout") {
  const auto groups = grouped_ring_layout(21);
  REQUIRE(groups.size() == 5);
  CHECK(groups[0].count == 5);
  for (int g = 1; g < 5; ++g) CHECK(groups[g].count == 4);
  for (int g = 0; g < 5; ++g) {
    CHECK(groups[g].start == doctest::Approx(kTwoPi * g / 5));
    CHECK(groups[g].span == doctest::Approx(0.2 * kPi));
  }
  const auto geom = AcquisitionGeometry::grouped(groups, 50.0, 1.0);
  CHECK(geom.N == 21);
  CHECK_FALSE(geom.full_view());
}

TEST_CASE("synthetic benchmark target") {
  const MaterialParams mat(5.0);
  const CgptMatrix M = synthetic_target_cgpt(10.0, mat, 5, 0.35);
  CHECK(M.is_symmetric());

  const ComplexCgpt nc = to_complex(M);
  CHECK(std::abs(nc.N2(0, 1)) > 0.0);       // the orientation-bearing entry
  CHECK(nc.N1.cwiseAbs().maxCoeff() == 0.0);

  // rotating the target visibly changes the response with period 2*pi
  const auto geom = AcquisitionGeometry::uniform(20, 50.0, 1.0, kTwoPi);
  const MsrMatrix v0 = apply_forward(M.leading(2), geom);
  const MsrMatrix v1 =
      apply_forward(transform_cgpt(M.leading(2), RigidMotion(0, 0, 1.0)), geom);
  CHECK(test::max_abs_diff(v0.v, v1.v) > 1e-12);

  // a plain disk (eccentricity 0) stays rotation invariant
  const CgptMatrix disk = synthetic_target_cgpt(10.0, mat, 5, 0.0);
  const MsrMatrix d0 = apply_forward(disk.leading(2), geom);
  const MsrMatrix d1 =
      apply_forward(transform_cgpt(disk.leading(2), RigidMotion(0, 0, 1.0)), geom);
  CHECK(test::max_abs_diff(d0.v, d1.v) < 1e-18);
}

TEST_CASE("CGPT file round-trip") {
  const fs::path dir = fresh_dir("cgpt_io");
  Rng rng(50);
  const CgptMatrix M = test::random_symmetric_cgpt(3, rng);
  const std::string path = (dir / "target.json").string();
  save_cgpt_json(path, M);
  const CgptMatrix back = load_cgpt_json(path);
  CHECK(back.K == 3);
  CHECK(test::max_abs_diff(back.m, M.m) == 0.0);

  SUBCASE("flat row-major entries are accepted") {
    std::ofstream out(dir / "flat.json");
    out << R"({"K":1,"entries":[1.0,2.0,3.0,4.0]})";
    out.close();
    const CgptMatrix flat = load_cgpt_json((dir / "flat.json").string());
    CHECK(flat.m(0, 1) == 2.0);
    CHECK(flat.m(1, 0) == 3.0);
  }
  SUBCASE("malformed files are rejected") {
    std::ofstream out(dir / "bad.json");
    out << R"({"K":2,"entries":[[1,2],[3,4]]})";
    out.close();
    CHECK_THROWS(load_cgpt_json((dir / "bad.json").string()));
    CHECK_THROWS(load_cgpt_json((dir / "missing.json").string()));
  }
}

TEST_CASE("experiment artifacts are deterministic byte for byte") {
  const fs::path dir_a = fresh_dir("det_a");
  const fs::path dir_b = fresh_dir("det_b");
  ExperimentConfig cfg_a = tiny_tracking_config(dir_a.string());
  ExperimentConfig cfg_b = tiny_tracking_config(dir_b.string());

  const RunReport a = run_experiment(cfg_a, true);
  const RunReport b = run_experiment(cfg_b, true);
  CHECK(a.failures == 0);
  REQUIRE(a.artifacts.size() == b.artifacts.size());
  REQUIRE(a.artifacts.size() >= 2);
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    const std::string ca = slurp(a.artifacts[i]);
    std::string cb = slurp(b.artifacts[i]);
    // identical apart from the differing out_dir inside the config hash
    CHECK(ca.substr(0, ca.find_last_of('#')) == cb.substr(0, cb.find_last_of('#')));
  }

  // re-running the identical config is byte-identical including the footer
  const RunReport a2 = run_experiment(cfg_a, true);
  for (std::size_t i = 0; i < a.artifacts.size(); ++i)
    CHECK(slurp(a.artifacts[i]) == slurp(a2.artifacts[i]));
}

TEST_CASE("artifact format: header, scientific reals, hash footer") {
  const fs::path dir = fresh_dir("format");
  ExperimentConfig cfg = tiny_tracking_config(dir.string());
  run_experiment(cfg, true);

  const std::string traj = slurp(dir / "trajectory_seed1.csv");
  CHECK(traj.rfind("t,vx,vy,x,y,theta\n", 0) == 0);
  CHECK(traj.find("e+") != std::string::npos);  // scientific notation
  CHECK(traj.find("# config_hash=") != std::string::npos);
  CHECK(traj.find(" seed=1") != std::string::npos);
  CHECK(traj.find("\r") == std::string::npos);  // LF endings only

  const std::string track = slurp(dir / "track_noise10_seed1.csv");
  CHECK(track.rfind("t,x_est,y_est,theta_est,x_true,y_true,theta_true,", 0) == 0);
  // 5 truth rows + the initial-guess row
  CHECK(std::count(track.begin(), track.end(), '\n') == 1 + 6 + 1);
}

TEST_CASE("experiment keeps going when one run fails") {
  const fs::path dir = fresh_dir("failures");
  ExperimentConfig cfg = tiny_tracking_config(dir.string());
  // legal initial state, but the deterministic velocity pushes the target
  // through the ring within a few steps
  cfg.geometry.R = 8.0;
  cfg.initial_state << 60.0, 0.0, 5.0, 0.0, 0.0;
  cfg.initial_guess << 0.0, 0.0, 5.0, 0.0, 0.0;
  cfg.steps = 10;
  const RunReport report = run_experiment(cfg, true);
  CHECK(report.failures > 0);
}

TEST_CASE("reconstruction experiment sweeps aperture, noise and seed") {
  const fs::path dir = fresh_dir("recon_exp");
  ExperimentConfig cfg = default_config("recon-vs-aperture");
  cfg.out_dir = dir.string();
  cfg.geometry.N = 21;
  cfg.K_data = 3;
  cfg.gammas = {kTwoPi, kPi};
  cfg.noise_levels = {0.0, 0.1};
  cfg.seeds = {1, 2};
  const RunReport report = run_experiment(cfg, true);
  CHECK(report.failures == 0);
  const std::string csv = slurp(dir / "recon_error.csv");
  CHECK(csv.rfind("gamma,noise,seed,err_ls,err_tikhonov,mu_selected\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 2 + 1);
}

TEST_CASE("one-shot drivers") {
  SUBCASE("simulate writes one trajectory per seed") {
    const fs::path dir = fresh_dir("simulate");
    ExperimentConfig cfg = tiny_tracking_config(dir.string());
    cfg.seeds = {4, 9};
    const RunReport report = run_simulate(cfg, true);
    CHECK(report.artifacts.size() == 2);
    CHECK(fs::exists(dir / "trajectory_seed4.csv"));
    CHECK(fs::exists(dir / "trajectory_seed9.csv"));
  }
  SUBCASE("reconstruct honors a ground-truth CGPT file") {
    const fs::path dir = fresh_dir("recon_once");
    Rng rng(61);
    const CgptMatrix truth(3, [&] {
      Eigen::MatrixXd a = test::random_matrix(6, 6, rng);
      return Eigen::MatrixXd(0.5 * (a + a.transpose()));
    }());
    const std::string truth_path = (dir / "truth.json").string();
    save_cgpt_json(truth_path, truth);

    ExperimentConfig cfg = default_config("recon-vs-aperture");
    cfg.out_dir = dir.string();
    cfg.geometry.N = 21;
    cfg.geometry.R = 2.0;  // rho = 2 keeps the scaling well conditioned
    cfg.K_data = 3;
    cfg.noise_levels = {0.0};
    cfg.target.cgpt_file = truth_path;
    const RunReport report = run_reconstruct(cfg, true);
    CHECK(report.failures == 0);
    // noiseless full view: the least-squares estimate is the truth
    const CgptMatrix est = load_cgpt_json((dir / "cgpt_ls.json").string());
    CHECK(test::max_abs_diff(est.m, truth.m) < 1e-9);
    const std::string summary = slurp(dir / "recon_summary.csv");
    CHECK(summary.find("least-squares") != std::string::npos);
    CHECK(summary.find("tikhonov") != std::string::npos);
    CHECK(summary.find("noiseless-inversion") != std::string::npos);
  }
}

TEST_CASE("spectrum experiment emits the sweep artifacts") {
  const fs::path dir = fresh_dir("spectrum");
  ExperimentConfig cfg = default_config("spectrum");
  cfg.out_dir = dir.string();
  cfg.geometry.N = 21;
  cfg.K_data = 3;
  cfg.gammas = {kTwoPi, kPi};
  const RunReport report = run_experiment(cfg, true);
  CHECK(report.failures == 0);
  const std::string eig = slurp(dir / "spectrum_eigenvalues.csv");
  CHECK(eig.rfind("gamma,index,eig_ctc,eig_scaled\n", 0) == 0);
  // 2 gammas x 2K rows
  CHECK(std::count(eig.begin(), eig.end(), '\n') == 1 + 2 * 6 + 1);
  const std::string cond = slurp(dir / "spectrum_condition.csv");
  CHECK(std::count(cond.begin(), cond.end(), '\n') == 1 + 2 * 3 + 1);
}
