#pragma once

#include "cgpt/reconstruct.hpp"
#include "cgpt/tracker.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cgpt {

struct GeometryConfig {
  std::string layout = "uniform";  // "uniform" | "grouped"
  int N = 20;
  double R = 34.0;
  double delta = 1.0;
  double gamma = kTwoPi;
  std::vector<ReceiverGroup> groups;

  AcquisitionGeometry build() const;
};

struct TargetConfig {
  std::vector<double> scales = {10.0};  // target diameters
  double eccentricity = 0.95;  // order-(1,2) coupling, fraction of the PSD bound
  std::string cgpt_file;  // optional ground-truth CGPT (JSON), overrides the synthetic one
};

/// Fully resolved experiment description; serializes losslessly to JSON.
struct ExperimentConfig {
  std::string experiment = "track-fullview";
  std::string out_dir = ".";
  std::vector<std::uint64_t> seeds = {1};
  GeometryConfig geometry;
  double kappa = 5.0;
  int K_data = 5;
  int K_track = 2;
  MotionModel motion;
  int steps = 1000;
  std::vector<double> noise_levels = {0.1, 0.2};
  TargetConfig target;
  Vector5d initial_state = Vector5d::Zero();
  Vector5d initial_guess = Vector5d::Zero();
  std::vector<double> gammas;  // aperture sweep for spectrum / reconstruction
};

/// Baseline configuration for one of the canned experiment ids
/// ("spectrum", "recon-vs-aperture", "track-fullview", "track-limited").
ExperimentConfig default_config(const std::string& experiment);

/// Parse a JSON config on top of the experiment defaults and validate every
/// module precondition. Throws ConfigError with the offending field path.
ExperimentConfig config_from_json(const std::string& text);

/// Canonical (key-sorted) JSON serialization; config_from_json inverts it.
std::string config_to_json(const ExperimentConfig& config);

/// Reads and parses a config file; missing file reports NotFound.
ExperimentConfig load_config(const std::string& path);

void validate_config(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

/// Five receiver arcs of span 0.2*pi starting at 2*pi*(g-1)/5, receiver
/// counts balanced with the remainder on the leading groups
/// (N = 21 gives 5,4,4,4,4).
std::vector<ReceiverGroup> grouped_ring_layout(int N, int groups = 5,
                                               double span = 0.2 * 3.14159265358979323846);

/// Benchmark target: disk of the given diameter plus a symmetric
/// order-(1,2) block perturbation of relative size `eccentricity`, which
/// makes the orientation observable while keeping the matrix symmetric.
CgptMatrix synthetic_target_cgpt(double scale, const MaterialParams& material, int K,
                                 double eccentricity);

/// Ground-truth CGPT file IO: JSON object {"K": k, "entries": 2K x 2K rows}.
CgptMatrix load_cgpt_json(const std::string& path);
void save_cgpt_json(const std::string& path, const CgptMatrix& M);

struct RunReport {
  std::vector<std::string> artifacts;
  int failures = 0;
};

/// Dispatch on config.experiment and emit the CSV artifacts for that
/// protocol. Per-seed failures are recorded and the run continues.
RunReport run_experiment(const ExperimentConfig& config, bool quiet = false);

// Single-shot drivers behind the CLI subcommands.
RunReport run_simulate(const ExperimentConfig& config, bool quiet = false);
RunReport run_reconstruct(const ExperimentConfig& config, bool quiet = false);
RunReport run_spectrum(const ExperimentConfig& config, bool quiet = false);
RunReport run_track(const ExperimentConfig& config, bool quiet = false);

}  // namespace cgpt
