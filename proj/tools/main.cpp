#include "cgpt/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<long long> seed;
  std::string out_dir;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment configuration (JSON)");
  cmd->add_option("--seed", opts.seed, "override the seed list with a single seed");
  cmd->add_option("--out", opts.out_dir, "output directory for CSV artifacts");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
}

cgpt::ExperimentConfig resolve(const CommonOptions& opts, const std::string& fallback_id) {
  cgpt::ExperimentConfig cfg = opts.config_path.empty()
                                   ? cgpt::default_config(fallback_id)
                                   : cgpt::load_config(opts.config_path);
  if (opts.seed) cfg.seeds = {static_cast<std::uint64_t>(*opts.seed)};
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multistatic-response workbench: CGPT simulation, reconstruction and tracking"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string experiment_id;

  auto* simulate = app.add_subcommand("simulate", "sample a target trajectory and export it");
  add_common(simulate, opts);
  auto* reconstruct =
      app.add_subcommand("reconstruct", "recover a CGPT from noisy MSR data (one shot)");
  add_common(reconstruct, opts);
  auto* spectrum = app.add_subcommand("spectrum", "spectral report for one acquisition geometry");
  add_common(spectrum, opts);
  auto* track = app.add_subcommand("track", "run the extended Kalman tracker on simulated data");
  add_common(track, opts);
  auto* experiment = app.add_subcommand("experiment", "run a canned experiment protocol");
  experiment->add_option("id", experiment_id,
                         "spectrum | recon-vs-aperture | track-fullview | track-limited")
      ->required();
  add_common(experiment, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cgpt::RunReport report;
    if (simulate->parsed()) {
      report = cgpt::run_simulate(resolve(opts, "track-fullview"), opts.quiet);
    } else if (reconstruct->parsed()) {
      report = cgpt::run_reconstruct(resolve(opts, "recon-vs-aperture"), opts.quiet);
    } else if (spectrum->parsed()) {
      report = cgpt::run_spectrum(resolve(opts, "spectrum"), opts.quiet);
    } else if (track->parsed()) {
      report = cgpt::run_track(resolve(opts, "track-fullview"), opts.quiet);
    } else if (experiment->parsed()) {
      cgpt::ExperimentConfig cfg = resolve(opts, experiment_id);
      cfg.experiment = experiment_id;
      report = cgpt::run_experiment(cfg, opts.quiet);
    }
    if (report.failures > 0) {
      std::fprintf(stderr, "%d run(s) failed\n", report.failures);
      return 2;
    }
  } catch (const cgpt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
