#include "cgpt/harness.hpp"

#include "cgpt/acquisition.hpp"
#include "cgpt/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace cgpt {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

Matrix5d initial_covariance() {
  Matrix5d P = Matrix5d::Zero();
  P.diagonal() << 1.0, 1.0, 25.0, 25.0, kPi * kPi;
  return P;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(scope.empty() ? it.key() : scope + "." + it.key(), "unknown field");
}

template <typename T>
void read_field(const json& j, const std::string& scope, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(scope.empty() ? key : scope + "." + std::string(key), e.what());
  }
}

void read_vector5(const json& j, const char* key, Vector5d& out) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  read_field(j, "", key, v);
  if (v.size() != 5)
    throw ConfigError(key, "expected 5 entries (vx, vy, x, y, theta)");
  for (int i = 0; i < 5; ++i) out(i) = v[i];
}

std::string percent_label(double p) { return std::to_string(static_cast<int>(std::lround(p * 100.0))); }

std::string scale_label(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", s);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void note(bool quiet, const std::string& line) {
  if (!quiet) std::fprintf(stdout, "%s\n", line.c_str());
}

CgptMatrix experiment_target(const ExperimentConfig& cfg, double scale) {
  if (!cfg.target.cgpt_file.empty()) {
    CgptMatrix M = load_cgpt_json(cfg.target.cgpt_file);
    if (M.K < cfg.K_data)
      throw ConfigError("target.cgpt_file", "ground-truth CGPT has order below K_data");
    return M.K == cfg.K_data ? M : M.leading(cfg.K_data);
  }
  return synthetic_target_cgpt(scale, MaterialParams(cfg.kappa), cfg.K_data,
                               cfg.target.eccentricity);
}

/// Measurement-noise std handed to the filter (R assumed known). Uses the
/// mean per-frame std of the stream, with a tiny floor so that R stays
/// positive definite on noise-free runs.
double observation_noise(const MsrStream& stream, const AcquisitionGeometry& geom) {
  const double sigma = stream.mean_noise_std();
  if (sigma > 0.0) return sigma;
  return 1e-12 * (stream.frames.front().v.norm() / geom.N + 1e-300);
}

void write_trajectory_csv(const std::string& path, const std::vector<TargetState>& states,
                          std::uint64_t hash, std::uint64_t seed) {
  CsvWriter w(path, {"t", "vx", "vy", "x", "y", "theta"});
  for (std::size_t t = 0; t < states.size(); ++t) {
    const TargetState& s = states[t];
    w.write_row({CsvWriter::num(static_cast<long long>(t)), CsvWriter::num(s.v.x()),
                 CsvWriter::num(s.v.y()), CsvWriter::num(s.z.x()), CsvWriter::num(s.z.y()),
                 CsvWriter::num(s.theta)});
  }
  w.finish(hash, seed);
}

void write_track_csv(const std::string& path, const GaussianBelief& init,
                     const TrackerRun& run, const std::vector<TargetState>& truth,
                     std::uint64_t hash, std::uint64_t seed) {
  CsvWriter w(path, {"t", "x_est", "y_est", "theta_est", "x_true", "y_true", "theta_true",
                     "cov_vx", "cov_vy", "cov_x", "cov_y", "cov_theta"});
  // row t = 0 carries the initial guess; row t >= 1 the posterior after V_t
  for (std::size_t t = 0; t < run.beliefs.size() + 1; ++t) {
    const GaussianBelief& b = (t == 0) ? init : run.beliefs[t - 1];
    const TargetState& s = truth[t];
    w.write_row({CsvWriter::num(static_cast<long long>(t)), CsvWriter::num(b.mean(2)),
                 CsvWriter::num(b.mean(3)), CsvWriter::num(b.mean(4)), CsvWriter::num(s.z.x()),
                 CsvWriter::num(s.z.y()), CsvWriter::num(s.theta), CsvWriter::num(b.cov(0, 0)),
                 CsvWriter::num(b.cov(1, 1)), CsvWriter::num(b.cov(2, 2)),
                 CsvWriter::num(b.cov(3, 3)), CsvWriter::num(b.cov(4, 4))});
  }
  w.finish(hash, seed);
}

RunReport spectrum_experiment(const ExperimentConfig& cfg, bool quiet) {
  RunReport report;
  const std::uint64_t hash = config_hash(cfg);
  const std::uint64_t seed = cfg.seeds.front();

  const std::string eig_path = join_path(cfg.out_dir, "spectrum_eigenvalues.csv");
  CsvWriter eig(eig_path, {"gamma", "index", "eig_ctc", "eig_scaled"});
  const std::string cond_path = join_path(cfg.out_dir, "spectrum_condition.csv");
  CsvWriter cond(cond_path,
                 {"gamma", "K", "log10_cond_ctc", "log10_cond_L", "numerically_singular"});

  for (double gamma : cfg.gammas) {
    const AcquisitionGeometry geom =
        AcquisitionGeometry::uniform(cfg.geometry.N, cfg.geometry.R, cfg.geometry.delta, gamma);
    const Eigen::VectorXd bare = gram_eigenvalues(geom, cfg.K_data, false);
    const Eigen::VectorXd scaled = gram_eigenvalues(geom, cfg.K_data, true);
    for (Eigen::Index i = 0; i < bare.size(); ++i)
      eig.write_row({CsvWriter::num(gamma), CsvWriter::num(static_cast<long long>(i + 1)),
                     CsvWriter::num(bare(i)), CsvWriter::num(scaled(i))});
    for (int K = 1; K <= cfg.K_data; ++K) {
      const SpectrumReport rep = limitedview_spectrum(geom, K);
      cond.write_row({CsvWriter::num(gamma), CsvWriter::num(K),
                      CsvWriter::num(2.0 * std::log10(rep.coefficient_condition)),
                      CsvWriter::num(rep.log10_condition),
                      CsvWriter::num(rep.numerically_singular ? 1 : 0)});
    }
  }
  eig.finish(hash, seed);
  cond.finish(hash, seed);
  report.artifacts = {eig_path, cond_path};
  note(quiet, "wrote " + eig_path);
  note(quiet, "wrote " + cond_path);
  return report;
}

RunReport recon_experiment(const ExperimentConfig& cfg, bool quiet) {
  RunReport report;
  const std::uint64_t hash = config_hash(cfg);
  const CgptMatrix M_true = experiment_target(cfg, cfg.target.scales.front());
  const RegularizationGrid grid = RegularizationGrid::log_default();

  const std::string path = join_path(cfg.out_dir, "recon_error.csv");
  CsvWriter out(path, {"gamma", "noise", "seed", "err_ls", "err_tikhonov", "mu_selected"});

  for (double gamma : cfg.gammas) {
    const AcquisitionGeometry geom =
        AcquisitionGeometry::uniform(cfg.geometry.N, cfg.geometry.R, cfg.geometry.delta, gamma);
    const MsrMatrix clean = apply_forward(M_true, geom);
    for (double p : cfg.noise_levels) {
      for (std::uint64_t seed : cfg.seeds) {
        Rng rng = Rng(seed).substream("recon-noise");
        MsrMatrix V = clean;
        const double sigma = p * clean.v.norm() / geom.N;
        for (int i = 0; i < geom.N; ++i)
          for (int j = 0; j < geom.N; ++j) V.v(i, j) += sigma * rng.gaussian();

        const CgptMatrix ls = solve_least_squares(V, geom, cfg.K_data);
        const MuSelection sel = select_mu(V, geom, cfg.K_data, M_true, grid);
        out.write_row({CsvWriter::num(gamma), CsvWriter::num(p), CsvWriter::num(seed),
                       CsvWriter::num(leading_orders_error(ls, M_true)),
                       CsvWriter::num(sel.error), CsvWriter::num(sel.mu)});
      }
    }
  }
  out.finish(hash, cfg.seeds.front());
  report.artifacts = {path};
  note(quiet, "wrote " + path);
  return report;
}

RunReport track_runs(const ExperimentConfig& cfg, bool quiet,
                     const std::vector<std::pair<std::string, AcquisitionGeometry>>& layouts) {
  RunReport report;
  const std::uint64_t hash = config_hash(cfg);
  const GaussianBelief init{cfg.initial_guess, initial_covariance()};

  for (std::uint64_t seed : cfg.seeds) {
    const std::vector<TargetState> truth = simulate_trajectory(
        cfg.motion, TargetState::from_vec(cfg.initial_state), cfg.steps, NoiseSpec(0.0, seed));
    const std::string traj_path =
        join_path(cfg.out_dir, "trajectory_seed" + std::to_string(seed) + ".csv");
    write_trajectory_csv(traj_path, truth, hash, seed);
    report.artifacts.push_back(traj_path);
    note(quiet, "wrote " + traj_path);

    for (double scale : cfg.target.scales) {
      for (const auto& [layout_name, geom] : layouts) {
        for (double p : cfg.noise_levels) {
          std::string name = "track";
          if (!layout_name.empty()) name += "_" + layout_name;
          if (cfg.target.scales.size() > 1) name += "_scale" + scale_label(scale);
          name += "_noise" + percent_label(p) + "_seed" + std::to_string(seed) + ".csv";
          const std::string path = join_path(cfg.out_dir, name);
          try {
            const CgptMatrix M_full = experiment_target(cfg, scale);
            const MsrStream stream =
                generate_msr_stream(M_full, truth, geom, NoiseSpec(p, seed), cfg.K_data);
            // frame 0 is measured at the initial epoch; the filter consumes
            // the frames that follow it, with the per-frame noise level as
            // its (known) measurement covariance
            const std::vector<MsrMatrix> frames(stream.frames.begin() + 1,
                                                stream.frames.end());
            const std::vector<double> frame_noise(stream.noise_std.begin() + 1,
                                                  stream.noise_std.end());
            const ObservationModel model(M_full.leading(cfg.K_track), geom,
                                         observation_noise(stream, geom));
            const TrackerRun run = run_tracker(frames, model, cfg.motion, init, frame_noise);
            write_track_csv(path, init, run, truth, hash, seed);
            report.artifacts.push_back(path);
            note(quiet, "wrote " + path);
            if (!run.clamped_frames.empty())
              note(quiet, "  note: clamped predicted position in " +
                              std::to_string(run.clamped_frames.size()) + " frame(s)");
          } catch (const std::exception& e) {
            ++report.failures;
            note(quiet, std::string("run failed (") + name + "): " + e.what());
          }
        }
      }
    }
  }
  return report;
}

RunReport track_fullview_experiment(const ExperimentConfig& cfg, bool quiet) {
  return track_runs(cfg, quiet, {{"", cfg.geometry.build()}});
}

RunReport track_limited_experiment(const ExperimentConfig& cfg, bool quiet) {
  const AcquisitionGeometry uniform = AcquisitionGeometry::uniform(
      cfg.geometry.N, cfg.geometry.R, cfg.geometry.delta, cfg.geometry.gamma);
  const AcquisitionGeometry grouped = AcquisitionGeometry::grouped(
      grouped_ring_layout(cfg.geometry.N), cfg.geometry.R, cfg.geometry.delta);
  return track_runs(cfg, quiet, {{"uniform", uniform}, {"grouped", grouped}});
}

}  // namespace

AcquisitionGeometry GeometryConfig::build() const {
  if (layout == "uniform") return AcquisitionGeometry::uniform(N, R, delta, gamma);
  if (layout == "grouped") {
    auto g = AcquisitionGeometry::grouped(groups, R, delta);
    if (g.N != N) throw std::invalid_argument("geometry: group counts do not sum to N");
    return g;
  }
  throw std::invalid_argument("geometry: unknown layout '" + layout + "'");
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.initial_state << -1.0, 1.0, 5.0, -5.0, 3.0 * kPi / 2.0;
  cfg.initial_guess << 0.0, 0.0, 10.0, -0.5, 0.0;

  if (experiment == "spectrum") {
    cfg.geometry = {"uniform", 101, 1.2, 1.0, kTwoPi, {}};
    cfg.K_data = 50;
    cfg.noise_levels = {};
    cfg.gammas = {kTwoPi, 1.5 * kPi, kPi, 0.5 * kPi};
    cfg.target.scales = {2.0};
  } else if (experiment == "recon-vs-aperture") {
    cfg.geometry = {"uniform", 101, 1.2, 1.0, kTwoPi, {}};
    cfg.K_data = 5;
    cfg.noise_levels = {0.0, 0.01, 0.1};
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.gammas = {kPi / 4, kPi / 2, 3 * kPi / 4, kPi, 5 * kPi / 4, 1.5 * kPi, 7 * kPi / 4, kTwoPi};
    cfg.target.scales = {2.0};
  } else if (experiment == "track-fullview") {
    cfg.target.scales = {10.0, 1.0};
    cfg.seeds = {2};  // the sampled path of seed 2 stays inside the default ring
  } else if (experiment == "track-limited") {
    cfg.geometry = {"uniform", 21, 34.0, 1.0, kPi, {}};
    cfg.noise_levels = {0.1};
    cfg.target.scales = {10.0};
    cfg.seeds = {2};
  } else {
    throw ConfigError("experiment", "unknown experiment id '" + experiment + "'");
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["out_dir"] = c.out_dir;
  j["seeds"] = c.seeds;
  json groups = json::array();
  for (const auto& g : c.geometry.groups)
    groups.push_back({{"start", g.start}, {"span", g.span}, {"count", g.count}});
  j["geometry"] = {{"layout", c.geometry.layout}, {"N", c.geometry.N},  {"R", c.geometry.R},
                   {"delta", c.geometry.delta},   {"gamma", c.geometry.gamma},
                   {"groups", groups}};
  j["material"] = {{"kappa", c.kappa}};
  j["orders"] = {{"K_data", c.K_data}, {"K_track", c.K_track}};
  j["motion"] = {{"sigma_a", c.motion.sigma_a},
                 {"sigma_theta", c.motion.sigma_theta},
                 {"dtau", c.motion.dtau},
                 {"steps", c.steps}};
  j["noise_levels"] = c.noise_levels;
  j["target"] = {{"scales", c.target.scales},
                 {"eccentricity", c.target.eccentricity},
                 {"cgpt_file", c.target.cgpt_file}};
  j["initial_state"] = std::vector<double>(c.initial_state.data(), c.initial_state.data() + 5);
  j["initial_guess"] = std::vector<double>(c.initial_guess.data(), c.initial_guess.data() + 5);
  j["gammas"] = c.gammas;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  if (!j.contains("experiment")) throw ConfigError("experiment", "required field is missing");

  reject_unknown_keys(j, {"experiment", "out_dir", "seeds", "geometry", "material", "orders",
                          "motion", "noise_levels", "target", "initial_state", "initial_guess",
                          "gammas"},
                      "");

  std::string experiment;
  read_field(j, "", "experiment", experiment);
  ExperimentConfig cfg = default_config(experiment);

  read_field(j, "", "out_dir", cfg.out_dir);
  read_field(j, "", "seeds", cfg.seeds);
  read_field(j, "", "noise_levels", cfg.noise_levels);
  read_field(j, "", "gammas", cfg.gammas);
  read_vector5(j, "initial_state", cfg.initial_state);
  read_vector5(j, "initial_guess", cfg.initial_guess);

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    reject_unknown_keys(g, {"layout", "N", "R", "delta", "gamma", "groups"}, "geometry");
    read_field(g, "geometry", "layout", cfg.geometry.layout);
    read_field(g, "geometry", "N", cfg.geometry.N);
    read_field(g, "geometry", "R", cfg.geometry.R);
    read_field(g, "geometry", "delta", cfg.geometry.delta);
    read_field(g, "geometry", "gamma", cfg.geometry.gamma);
    if (g.contains("groups")) {
      cfg.geometry.groups.clear();
      try {
        for (const auto& item : g.at("groups"))
          cfg.geometry.groups.push_back({item.at("start").get<double>(),
                                         item.at("span").get<double>(),
                                         item.at("count").get<int>()});
      } catch (const json::exception& e) {
        throw ConfigError("geometry.groups", e.what());
      }
    }
  }
  if (j.contains("material")) {
    reject_unknown_keys(j.at("material"), {"kappa"}, "material");
    read_field(j.at("material"), "material", "kappa", cfg.kappa);
  }
  if (j.contains("orders")) {
    reject_unknown_keys(j.at("orders"), {"K_data", "K_track"}, "orders");
    read_field(j.at("orders"), "orders", "K_data", cfg.K_data);
    read_field(j.at("orders"), "orders", "K_track", cfg.K_track);
  }
  if (j.contains("motion")) {
    reject_unknown_keys(j.at("motion"), {"sigma_a", "sigma_theta", "dtau", "steps"}, "motion");
    read_field(j.at("motion"), "motion", "sigma_a", cfg.motion.sigma_a);
    read_field(j.at("motion"), "motion", "sigma_theta", cfg.motion.sigma_theta);
    read_field(j.at("motion"), "motion", "dtau", cfg.motion.dtau);
    read_field(j.at("motion"), "motion", "steps", cfg.steps);
  }
  if (j.contains("target")) {
    reject_unknown_keys(j.at("target"), {"scales", "eccentricity", "cgpt_file"}, "target");
    read_field(j.at("target"), "target", "scales", cfg.target.scales);
    read_field(j.at("target"), "target", "eccentricity", cfg.target.eccentricity);
    read_field(j.at("target"), "target", "cgpt_file", cfg.target.cgpt_file);
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "NotFound: cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

void validate_config(const ExperimentConfig& cfg) {
  static const std::set<std::string> kIds = {"spectrum", "recon-vs-aperture", "track-fullview",
                                             "track-limited"};
  if (!kIds.count(cfg.experiment))
    throw ConfigError("experiment", "unknown experiment id '" + cfg.experiment + "'");

  try {
    cfg.geometry.build();
  } catch (const std::exception& e) {
    throw ConfigError("geometry", e.what());
  }
  if (cfg.K_data < 1) throw ConfigError("orders.K_data", "must be >= 1");
  if (cfg.K_track < 1) throw ConfigError("orders.K_track", "must be >= 1");
  if (cfg.K_track > cfg.K_data)
    throw ConfigError("orders.K_track", "tracking order cannot exceed K_data");
  if (cfg.geometry.N < 2 * cfg.K_data)
    throw ConfigError("orders.K_data", "precondition N >= 2K violated (N=" +
                                           std::to_string(cfg.geometry.N) + ")");
  if (cfg.geometry.N < 2 * cfg.K_track)
    throw ConfigError("orders.K_track", "precondition N >= 2K violated (N=" +
                                            std::to_string(cfg.geometry.N) + ")");
  try {
    MaterialParams mat(cfg.kappa);
  } catch (const std::exception& e) {
    throw ConfigError("material.kappa", e.what());
  }
  if (!(cfg.motion.sigma_a > 0.0)) throw ConfigError("motion.sigma_a", "must be positive");
  if (!(cfg.motion.sigma_theta > 0.0))
    throw ConfigError("motion.sigma_theta", "must be positive");
  if (!(cfg.motion.dtau > 0.0)) throw ConfigError("motion.dtau", "must be positive");
  if (cfg.steps < 1) throw ConfigError("motion.steps", "must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("seeds", "must not be empty");
  for (double p : cfg.noise_levels)
    if (p < 0.0) throw ConfigError("noise_levels", "levels must be >= 0");
  if (cfg.target.scales.empty()) throw ConfigError("target.scales", "must not be empty");
  for (double s : cfg.target.scales)
    if (!(s > 0.0)) throw ConfigError("target.scales", "scales must be positive");
  if (cfg.target.eccentricity < 0.0)
    throw ConfigError("target.eccentricity", "must be >= 0");
  if (cfg.target.eccentricity > 0.0 && cfg.K_data < 2)
    throw ConfigError("target.eccentricity", "perturbed target needs K_data >= 2");

  const bool tracking = cfg.experiment.rfind("track", 0) == 0;
  if (tracking) {
    if (cfg.noise_levels.empty()) throw ConfigError("noise_levels", "must not be empty");
    const double limit = cfg.geometry.R - cfg.geometry.delta;
    if (cfg.initial_state.segment<2>(2).norm() >= limit)
      throw ConfigError("initial_state", "initial position violates containment |z| + delta < R");
    if (cfg.initial_guess.segment<2>(2).norm() >= limit)
      throw ConfigError("initial_guess", "initial guess violates containment |z| + delta < R");
  } else {
    if (cfg.gammas.empty()) throw ConfigError("gammas", "must not be empty");
    for (double g : cfg.gammas)
      if (!(g > 0.0) || g > kTwoPi + 1e-12)
        throw ConfigError("gammas", "apertures must lie in (0, 2*pi]");
  }
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a64(config_to_json(cfg)); }

std::vector<ReceiverGroup> grouped_ring_layout(int N, int groups, double span) {
  if (N < groups || groups < 1) throw std::invalid_argument("grouped layout: need N >= groups");
  std::vector<ReceiverGroup> out;
  const int base = N / groups, rem = N % groups;
  for (int g = 0; g < groups; ++g)
    out.push_back({kTwoPi * g / groups, span, base + (g < rem ? 1 : 0)});
  return out;
}

CgptMatrix synthetic_target_cgpt(double scale, const MaterialParams& material, int K,
                                 double eccentricity) {
  if (K < 2 && eccentricity > 0.0)
    throw std::invalid_argument("synthetic target: perturbation needs K >= 2");
  if (eccentricity > 1.0)
    throw std::invalid_argument("synthetic target: eccentricity must lie in [0, 1]");
  const double radius = scale / 2.0;
  CgptMatrix M = disk_cgpt(radius, material, K);
  if (eccentricity > 0.0) {
    // Doubled second-order moments plus a cc = ss coupling between orders 1
    // and 2. The coupling feeds the second complex CGPT only, so the
    // response rotates with period 2*pi and the orientation is observable;
    // eccentricity expresses it as a fraction of the positive-definiteness
    // bound sqrt(M_11 * M_22), reached by thin non-centrosymmetric shapes.
    M.m(2, 2) *= 2.0;
    M.m(3, 3) *= 2.0;
    const double pert = eccentricity * std::sqrt(M.m(0, 0) * M.m(2, 2));
    M.m(0, 2) += pert;
    M.m(1, 3) += pert;
    M.m(2, 0) += pert;
    M.m(3, 1) += pert;
  }
  return M;
}

CgptMatrix load_cgpt_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open CGPT file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid CGPT file '" + path + "': " + e.what());
  }
  if (!j.contains("K") || !j.contains("entries"))
    throw std::runtime_error("CGPT file must contain fields K and entries");
  const int K = j.at("K").get<int>();
  if (K < 1) throw std::runtime_error("CGPT file: K must be >= 1");
  CgptMatrix M(K);
  const json& e = j.at("entries");
  if (e.is_array() && e.size() == static_cast<std::size_t>(2 * K) && e.front().is_array()) {
    for (int i = 0; i < 2 * K; ++i) {
      if (e.at(i).size() != static_cast<std::size_t>(2 * K))
        throw std::runtime_error("CGPT file: entries must be 2K x 2K");
      for (int jj = 0; jj < 2 * K; ++jj) M.m(i, jj) = e.at(i).at(jj).get<double>();
    }
  } else if (e.is_array() && e.size() == static_cast<std::size_t>(4 * K * K)) {
    for (int i = 0; i < 2 * K; ++i)
      for (int jj = 0; jj < 2 * K; ++jj) M.m(i, jj) = e.at(i * 2 * K + jj).get<double>();
  } else {
    throw std::runtime_error("CGPT file: entries must be a 2K x 2K (or flat row-major) array");
  }
  if (!M.m.allFinite()) throw std::runtime_error("CGPT file: entries must be finite");
  return M;
}

void save_cgpt_json(const std::string& path, const CgptMatrix& M) {
  json rows = json::array();
  for (int i = 0; i < 2 * M.K; ++i) {
    json row = json::array();
    for (int j = 0; j < 2 * M.K; ++j) row.push_back(M.m(i, j));
    rows.push_back(row);
  }
  json j{{"K", M.K}, {"entries", rows}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CGPT file '" + path + "'");
  out << j.dump(1) << '\n';
}

RunReport run_experiment(const ExperimentConfig& cfg, bool quiet) {
  validate_config(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  if (cfg.experiment == "spectrum") return spectrum_experiment(cfg, quiet);
  if (cfg.experiment == "recon-vs-aperture") return recon_experiment(cfg, quiet);
  if (cfg.experiment == "track-fullview") return track_fullview_experiment(cfg, quiet);
  if (cfg.experiment == "track-limited") return track_limited_experiment(cfg, quiet);
  throw ConfigError("experiment", "unknown experiment id '" + cfg.experiment + "'");
}

RunReport run_simulate(const ExperimentConfig& cfg, bool quiet) {
  std::filesystem::create_directories(cfg.out_dir);
  RunReport report;
  const std::uint64_t hash = config_hash(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    const auto states = simulate_trajectory(cfg.motion, TargetState::from_vec(cfg.initial_state),
                                            cfg.steps, NoiseSpec(0.0, seed));
    const std::string path =
        join_path(cfg.out_dir, "trajectory_seed" + std::to_string(seed) + ".csv");
    write_trajectory_csv(path, states, hash, seed);
    report.artifacts.push_back(path);
    note(quiet, "wrote " + path);
  }
  return report;
}

RunReport run_reconstruct(const ExperimentConfig& cfg, bool quiet) {
  std::filesystem::create_directories(cfg.out_dir);
  RunReport report;
  const std::uint64_t hash = config_hash(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  const double p = cfg.noise_levels.empty() ? 0.0 : cfg.noise_levels.front();
  const AcquisitionGeometry geom = cfg.geometry.build();
  const CgptMatrix M_true = experiment_target(cfg, cfg.target.scales.front());

  MsrMatrix V = apply_forward(M_true, geom);
  const double sigma = p * V.v.norm() / geom.N;
  Rng rng = Rng(seed).substream("recon-noise");
  for (int i = 0; i < geom.N; ++i)
    for (int j = 0; j < geom.N; ++j) V.v(i, j) += sigma * rng.gaussian();

  const CgptMatrix ls = solve_least_squares(V, geom, cfg.K_data);
  const MuSelection sel = select_mu(V, geom, cfg.K_data, M_true, RegularizationGrid::log_default());
  const CgptMatrix tik = solve_tikhonov(V, geom, cfg.K_data, sel.mu);

  const std::string summary_path = join_path(cfg.out_dir, "recon_summary.csv");
  CsvWriter out(summary_path, {"method", "err_first_two_orders", "mu"});
  out.write_row({"least-squares", CsvWriter::num(leading_orders_error(ls, M_true)),
                 CsvWriter::num(0.0)});
  out.write_row({"tikhonov", CsvWriter::num(sel.error), CsvWriter::num(sel.mu)});
  bool wrote_noiseless = false;
  if (geom.N > 2 * cfg.K_data) {
    const CgptMatrix direct = noiseless_inversion(V, geom, cfg.K_data);
    out.write_row({"noiseless-inversion", CsvWriter::num(leading_orders_error(direct, M_true)),
                   CsvWriter::num(0.0)});
    save_cgpt_json(join_path(cfg.out_dir, "cgpt_noiseless.json"), direct);
    wrote_noiseless = true;
  }
  out.finish(hash, seed);

  save_cgpt_json(join_path(cfg.out_dir, "cgpt_true.json"), M_true);
  save_cgpt_json(join_path(cfg.out_dir, "cgpt_ls.json"), ls);
  save_cgpt_json(join_path(cfg.out_dir, "cgpt_tikhonov.json"), tik);
  report.artifacts = {summary_path, join_path(cfg.out_dir, "cgpt_true.json"),
                      join_path(cfg.out_dir, "cgpt_ls.json"),
                      join_path(cfg.out_dir, "cgpt_tikhonov.json")};
  if (wrote_noiseless) report.artifacts.push_back(join_path(cfg.out_dir, "cgpt_noiseless.json"));
  for (const auto& a : report.artifacts) note(quiet, "wrote " + a);
  return report;
}

RunReport run_spectrum(const ExperimentConfig& cfg, bool quiet) {
  std::filesystem::create_directories(cfg.out_dir);
  RunReport report;
  const std::uint64_t hash = config_hash(cfg);
  const AcquisitionGeometry geom = cfg.geometry.build();

  const Eigen::VectorXd bare = gram_eigenvalues(geom, cfg.K_data, false);
  const Eigen::VectorXd scaled = gram_eigenvalues(geom, cfg.K_data, true);
  const std::string eig_path = join_path(cfg.out_dir, "spectrum_eigenvalues.csv");
  CsvWriter eig(eig_path, {"index", "eig_ctc", "eig_scaled"});
  for (Eigen::Index i = 0; i < bare.size(); ++i)
    eig.write_row({CsvWriter::num(static_cast<long long>(i + 1)), CsvWriter::num(bare(i)),
                   CsvWriter::num(scaled(i))});
  eig.finish(hash, cfg.seeds.front());

  const SpectrumReport rep = limitedview_spectrum(geom, cfg.K_data);
  const std::string rep_path = join_path(cfg.out_dir, "spectrum_report.csv");
  CsvWriter out(rep_path, {"K", "log10_cond_L", "log10_cond_bound", "cond_coefficient",
                           "numerically_singular"});
  out.write_row({CsvWriter::num(cfg.K_data), CsvWriter::num(rep.log10_condition),
                 CsvWriter::num(rep.log10_condition_bound),
                 CsvWriter::num(rep.coefficient_condition),
                 CsvWriter::num(rep.numerically_singular ? 1 : 0)});
  out.finish(hash, cfg.seeds.front());

  report.artifacts = {eig_path, rep_path};
  note(quiet, "wrote " + eig_path);
  note(quiet, "wrote " + rep_path);
  return report;
}

RunReport run_track(const ExperimentConfig& cfg, bool quiet) {
  std::filesystem::create_directories(cfg.out_dir);
  ExperimentConfig single = cfg;
  single.seeds = {cfg.seeds.front()};
  single.noise_levels = {cfg.noise_levels.empty() ? 0.1 : cfg.noise_levels.front()};
  single.target.scales = {cfg.target.scales.front()};
  return track_runs(single, quiet, {{"", cfg.geometry.build()}});
}

}  // namespace cgpt
