// Command-line front end: scenario simulation, tracking, CLEAR-MOT
// evaluation and parameter sweeps over the jumptrack library.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <optional>

#include "jumptrack/cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-target tracking of semi-static jumping objects"};
  app.require_subcommand(1);

  jumptrack::SimOptions sim_opt;
  CLI::App* sim = app.add_subcommand("sim", "generate a simulated dataset");
  sim->add_option("--config", sim_opt.config_path, "simulation config file")->required();
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--seed", sim_seed, "override rng_seed");
  sim->add_option("--out", sim_opt.dataset_out, "override dataset_out");
  sim->add_option("--truth-out", sim_opt.truth_out, "override truth_out");

  jumptrack::TrackOptions track_opt;
  CLI::App* track = app.add_subcommand("track", "run the tracker on a dataset");
  track->add_option("--config", track_opt.config_path, "run config file")->required();
  std::optional<std::uint64_t> track_seed;
  std::optional<int> track_threads;
  track->add_option("--seed", track_seed, "override rng_seed");
  track->add_option("--out", track_opt.track_out, "override track_out");
  track->add_option("--threads", track_threads,
                    "worker threads (JUMPTRACK_THREADS as fallback)");
  track->add_flag("--baseline", track_opt.baseline,
                  "run the movable/absent baseline tracker instead");
  track->add_option("--feature-threshold", track_opt.baseline_feature_threshold,
                    "baseline feature match threshold");
  track->add_option("--static-distance", track_opt.baseline_static_distance,
                    "baseline static-object distance (m)");

  jumptrack::EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand("eval", "score a track against ground truth");
  eval->add_option("--track", eval_opt.track_path, "track file")->required();
  eval->add_option("--truth", eval_opt.truth_path, "ground truth file")->required();
  eval->add_option("--gate", eval_opt.gate_m, "association gate (m)");
  eval->add_option("--out", eval_opt.report_json, "report JSON path");
  eval->add_option("--csv", eval_opt.report_csv, "also write a CSV report row");

  jumptrack::SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep to CSV");
  sweep->add_option("--sim-config", sweep_opt.sim_config_path, "base simulation config")
      ->required();
  sweep->add_option("--run-config", sweep_opt.run_config_path, "base run config")
      ->required();
  sweep->add_option("--axis", sweep_opt.axis,
                    "jump_rate | n_targets | n_particles | grid");
  sweep->add_option("--values", sweep_opt.values, "axis values")->required();
  sweep->add_option("--values2", sweep_opt.values2, "p_meas values for the grid axis");
  sweep->add_option("--repeats", sweep_opt.repeats, "simulations per value");
  sweep->add_option("--evals", sweep_opt.evals, "tracker evaluations per simulation");
  sweep->add_option("--out", sweep_opt.csv_out, "output CSV path");
  std::optional<int> sweep_threads;
  sweep->add_option("--threads", sweep_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      sim_opt.seed = sim_seed;
      return jumptrack::cmd_sim(sim_opt);
    }
    if (track->parsed()) {
      track_opt.seed = track_seed;
      track_opt.threads = track_threads;
      return jumptrack::cmd_track(track_opt);
    }
    if (eval->parsed()) return jumptrack::cmd_eval(eval_opt);
    if (sweep->parsed()) {
      sweep_opt.threads = sweep_threads;
      return jumptrack::cmd_sweep(sweep_opt);
    }
  } catch (const jumptrack::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const jumptrack::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const jumptrack::NumericError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitOk;
}
