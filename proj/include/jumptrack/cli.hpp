#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "jumptrack/baseline.hpp"
#include "jumptrack/filter.hpp"
#include "jumptrack/io.hpp"
#include "jumptrack/simulator.hpp"

namespace jumptrack {

/// --threads wins, then JUMPTRACK_THREADS, then 1.
inline int resolve_threads(std::optional<int> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("JUMPTRACK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

/// Runs the particle filter over a dataset and records per-round posteriors.
inline TrackFile run_tracker(const Dataset& dataset, const FilterParams& params,
                             int n_threads = 1, ParticleSet* final_set = nullptr) {
  dataset.validate();
  ParticleSet set = init(dataset.initial_targets, params, dataset.env);

  TrackFile track;
  track.sampler_mode = to_string(params.sampler_mode);
  for (const InitialTarget& t : dataset.initial_targets) track.labels.push_back(t.label);

  for (const Round& round : dataset.rounds) {
    step(set, round, params, dataset.env, n_threads);
    TrackRound rec;
    rec.time_step = round.time_step;
    rec.observed = round.observed;
    for (int j = 0; j < set.num_targets(); ++j) {
      const PosteriorSummary post = posterior(set, j);
      TrackTarget t;
      t.label = track.labels[static_cast<std::size_t>(j)];
      t.map_location = post.map_location;
      t.estimate = post.point_estimate;
      t.location_marginal = post.location_marginal;
      rec.targets.push_back(std::move(t));
    }
    track.rounds.push_back(std::move(rec));
  }
  if (final_set) *final_set = std::move(set);
  return track;
}

/// Track file for the movable/absent baseline, schema-identical to the
/// filter's output. Absent objects report the unknown location.
inline TrackFile run_baseline(const Dataset& dataset, const BaselineConfig& config) {
  dataset.validate();
  const auto history = baseline_track_states(dataset, config);
  TrackFile track;
  track.sampler_mode = "baseline";
  for (const InitialTarget& t : dataset.initial_targets) track.labels.push_back(t.label);
  for (std::size_t k = 0; k < history.size(); ++k) {
    TrackRound rec;
    rec.time_step = dataset.rounds[k].time_step;
    rec.observed = dataset.rounds[k].observed;
    for (const BaselineState& s : history[k]) {
      TrackTarget t;
      t.label = s.label;
      t.map_location = s.movable ? s.location : kUnknownLocation;
      if (s.movable) t.estimate = s.position;
      t.location_marginal[t.map_location] = 1.0;
      rec.targets.push_back(std::move(t));
    }
    track.rounds.push_back(std::move(rec));
  }
  return track;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct SimOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string dataset_out;  // overrides the config when non-empty
  std::string truth_out;
};

inline int cmd_sim(const SimOptions& opt) {
  SimConfigFile cfg = parse_sim_config(read_file(opt.config_path), opt.config_path);
  if (opt.seed) cfg.sim.rng_seed = *opt.seed;
  if (!opt.dataset_out.empty()) cfg.dataset_out = opt.dataset_out;
  if (!opt.truth_out.empty()) cfg.truth_out = opt.truth_out;

  const auto [dataset, truth] = generate(cfg.sim);
  write_dataset(cfg.dataset_out, dataset);
  write_truth(cfg.truth_out, truth);
  std::printf("wrote %zu rounds to %s (truth: %s)\n", dataset.rounds.size(),
              cfg.dataset_out.c_str(), cfg.truth_out.c_str());
  return 0;
}

struct TrackOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string track_out;  // overrides the config when non-empty
  std::optional<int> threads;
  bool baseline = false;
  double baseline_feature_threshold = 1.5;
  double baseline_static_distance = 0.3;
};

inline int cmd_track(const TrackOptions& opt) {
  RunConfig cfg = parse_run_config(read_file(opt.config_path), opt.config_path);
  if (opt.seed) cfg.rng_seed = *opt.seed;
  if (!opt.track_out.empty()) cfg.track_out = opt.track_out;
  if (cfg.dataset.empty()) throw ConfigError(opt.config_path + ": missing 'dataset'");

  const Dataset dataset = read_dataset(cfg.dataset);
  const auto start = std::chrono::steady_clock::now();

  TrackFile track;
  ParticleSet final_set;
  if (opt.baseline) {
    track = run_baseline(dataset,
                         {opt.baseline_feature_threshold, opt.baseline_static_distance});
  } else {
    const FilterParams params = cfg.resolve(dataset.feature_dim);
    track = run_tracker(dataset, params, resolve_threads(opt.threads), &final_set);
  }
  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  write_track(cfg.track_out, track);

  if (!cfg.summary_out.empty()) {
    json summary;
    summary["dataset"] = cfg.dataset;
    summary["track_out"] = cfg.track_out;
    summary["tracker"] = track.sampler_mode;
    summary["rounds"] = track.rounds.size();
    summary["targets"] = track.labels.size();
    summary["num_particles"] = opt.baseline ? 0 : cfg.num_particles;
    summary["resample_count"] = final_set.resample_count;
    summary["wall_ms"] = wall_ms;
    atomic_write(cfg.summary_out, summary.dump(2) + "\n");
  }
  std::printf("tracked %zu rounds (%s) in %lld ms -> %s\n", track.rounds.size(),
              track.sampler_mode.c_str(), static_cast<long long>(wall_ms),
              cfg.track_out.c_str());
  return 0;
}

struct EvalOptions {
  std::string track_path;
  std::string truth_path;
  double gate_m = 0.5;
  std::string report_json = "report.json";
  std::string report_csv;
};

inline int cmd_eval(const EvalOptions& opt) {
  const TrackFile track = read_track(opt.track_path);
  const GroundTruth truth = read_truth(opt.truth_path);
  const MotReport report =
      mot_evaluate(track_frames(track), truth.annotation_frames(), opt.gate_m);
  write_report_json(opt.report_json, report);
  if (!opt.report_csv.empty()) atomic_write(opt.report_csv, report_to_csv(report));
  std::printf("MOTA %.4f MOTP %.4f miss %.4f fp %.4f mismatch %.4f\n", report.mota,
              report.motp_m, report.miss_rate, report.false_positive_rate,
              report.mismatch_rate);
  return 0;
}

struct SweepOptions {
  std::string sim_config_path;
  std::string run_config_path;
  std::string axis = "jump_rate";
  std::vector<double> values;
  std::vector<double> values2;
  int repeats = 3;
  int evals = 10;
  std::string csv_out = "sweep.csv";
  std::optional<int> threads;
};

struct SweepRowResult {
  SweepRun run;
  MotReport report;
};

/// Executes a sweep manifest; runs are independent and processed by a worker
/// pool, results come back in manifest order.
inline std::vector<SweepRowResult> run_sweep(const SimConfig& base_sim,
                                             const RunConfig& base_run,
                                             SweepAxis axis,
                                             const std::vector<double>& values,
                                             const std::vector<double>& values2,
                                             int repeats, int evals, int n_threads) {
  const std::vector<SweepRun> manifest =
      sweep_manifest(base_sim, axis, values, values2, repeats, evals);
  std::vector<SweepRowResult> results(manifest.size());
  detail::parallel_for(static_cast<int>(manifest.size()), n_threads, [&](int i) {
    const SweepRun& run = manifest[static_cast<std::size_t>(i)];
    const auto [dataset, truth] = generate(run.sim);
    RunConfig cfg = base_run;
    cfg.rng_seed = run.eval_seed;
    if (run.num_particles > 0) cfg.num_particles = run.num_particles;
    if (run.p_jump > 0.0) cfg.p_jump = run.p_jump;
    if (run.p_meas > 0.0) cfg.p_meas = run.p_meas;
    const FilterParams params = cfg.resolve(dataset.feature_dim);
    const TrackFile track = run_tracker(dataset, params, 1);
    results[static_cast<std::size_t>(i)] = {
        run, mot_evaluate(track_frames(track), truth.annotation_frames())};
  });
  return results;
}

inline std::string sweep_results_to_csv(SweepAxis axis,
                                        const std::vector<SweepRowResult>& results) {
  std::ostringstream out;
  if (axis == SweepAxis::kGrid)
    out << "p_jump,p_meas,repeat,eval,mota,motp,miss,fp,mismatch\n";
  else
    out << "axis_value,repeat,eval,mota,motp,miss,fp,mismatch\n";
  for (const SweepRowResult& r : results) {
    out << format_double(r.run.axis_value) << ',';
    if (axis == SweepAxis::kGrid) out << format_double(r.run.axis_value2) << ',';
    out << r.run.repeat << ',' << r.run.eval << ',' << format_double(r.report.mota)
        << ',' << format_double(r.report.motp_m) << ','
        << format_double(r.report.miss_rate) << ','
        << format_double(r.report.false_positive_rate) << ','
        << format_double(r.report.mismatch_rate) << '\n';
  }
  return out.str();
}

inline int cmd_sweep(const SweepOptions& opt) {
  const SimConfigFile sim_cfg =
      parse_sim_config(read_file(opt.sim_config_path), opt.sim_config_path);
  const RunConfig run_cfg =
      parse_run_config(read_file(opt.run_config_path), opt.run_config_path);
  const SweepAxis axis = sweep_axis_from_string(opt.axis);
  if (opt.values.empty()) throw ConfigError("sweep needs --values");

  const auto results =
      run_sweep(sim_cfg.sim, run_cfg, axis, opt.values, opt.values2, opt.repeats,
                opt.evals, resolve_threads(opt.threads));
  atomic_write(opt.csv_out, sweep_results_to_csv(axis, results));
  std::printf("wrote %zu sweep rows to %s\n", results.size(), opt.csv_out.c_str());
  return 0;
}

}  // namespace jumptrack
