#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "jumptrack/metrics.hpp"
#include "jumptrack/rng.hpp"
#include "jumptrack/types.hpp"

namespace jumptrack {

/// Scenario generator configuration. Square locations are laid out side by
/// side on a global 2-D plane with a gap between them, so estimates in
/// different locations can never fall within the evaluation gate.
struct SimConfig {
  int n_locations = 3;
  int n_targets = 6;
  int n_rounds = 60;
  double true_p_jump = 0.05;
  double true_p_meas = 0.98;
  double sigma_q_true = 0.08;   // per-round local drift std (m)
  double sigma_r_true = 0.05;   // detector position noise std (m)
  double clutter_rate = 2.0;    // expected clutter detections per round
  int feature_dim = 3;
  double feature_cluster_spread = 0.5;  // feature noise std; clusters sit 6x apart
  double location_side_m = 4.4721359549995793;  // 20 m^2 rooms
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (n_locations < 1 || n_targets < 1 || n_rounds < 1)
      throw ConfigError("simulation counts must be positive");
    if (!(true_p_jump > 0.0 && true_p_jump < 1.0))
      throw ConfigError("true_p_jump must lie in (0, 1)");
    if (!(true_p_meas > 0.0 && true_p_meas < 1.0))
      throw ConfigError("true_p_meas must lie in (0, 1)");
    if (!(sigma_q_true > 0.0) || !(sigma_r_true > 0.0))
      throw ConfigError("simulation noise stds must be positive");
    if (clutter_rate < 0.0) throw ConfigError("clutter_rate must be non-negative");
    if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
    if (!(feature_cluster_spread > 0.0))
      throw ConfigError("feature_cluster_spread must be positive");
    if (!(location_side_m > 0.0))
      throw ConfigError("location_side_m must be positive");
  }
};

/// True state of one target at one round, plus whether the detector saw it.
struct TruthEntry {
  LocationId location = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  bool detected = false;
  int measurement = -1;
  Eigen::Vector2d measured_position = Eigen::Vector2d::Zero();
};

struct GroundTruth {
  std::vector<int> labels;
  std::vector<int> time_steps;
  std::vector<LocationId> observed;
  std::vector<std::vector<TruthEntry>> rounds;  // [round][target]

  /// Annotation frames for the evaluator: the labeled detections, at their
  /// measured positions.
  std::vector<Frame> annotation_frames() const {
    std::vector<Frame> frames;
    frames.reserve(rounds.size());
    for (std::size_t k = 0; k < rounds.size(); ++k) {
      Frame f;
      f.time_step = time_steps[k];
      for (std::size_t j = 0; j < rounds[k].size(); ++j)
        if (rounds[k][j].detected)
          f.points.push_back({labels[j], rounds[k][j].measured_position});
      frames.push_back(std::move(f));
    }
    return frames;
  }
};

namespace detail {

inline constexpr double kRoomGap = 2.0;

struct RoomLayout {
  double side;
  double x0(LocationId l) const { return l * (side + kRoomGap); }
  Eigen::Vector2d clip(LocationId l, const Eigen::Vector2d& p) const {
    Eigen::Vector2d out = p;
    out.x() = std::clamp(out.x(), x0(l), x0(l) + side);
    out.y() = std::clamp(out.y(), 0.0, side);
    return out;
  }
  Eigen::Vector2d sample(LocationId l, Rng& rng) const {
    return {x0(l) + rng.uniform() * side, rng.uniform() * side};
  }
};

/// Feature cluster centers on a lattice with spacing 6x the spread, one per
/// target: visual distinctiveness is held fixed so scenario difficulty is
/// governed by the jump rate.
inline std::vector<Eigen::VectorXd> feature_centers(int n_targets, int dim,
                                                    double spread) {
  const double spacing = 6.0 * spread;
  int grid = 1;
  while (std::pow(grid, dim) < n_targets) ++grid;
  std::vector<Eigen::VectorXd> centers;
  centers.reserve(static_cast<std::size_t>(n_targets));
  for (int j = 0; j < n_targets; ++j) {
    Eigen::VectorXd c(dim);
    int idx = j;
    for (int d = 0; d < dim; ++d) {
      c[d] = spacing * (idx % grid);
      idx /= grid;
    }
    centers.push_back(c);
  }
  return centers;
}

}  // namespace detail

/// Generates a synthetic dataset plus ground truth. Per round the robot
/// observes locations round-robin; targets jump with probability true_p_jump
/// (uniform location, uniform position) or drift with Gaussian noise clipped
/// to their room; targets in the observed room are detected with probability
/// true_p_meas, and a Poisson number of clutter detections is added with
/// positions uniform in the room and features uniform over the cluster box.
inline std::pair<Dataset, GroundTruth> generate(const SimConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed({cfg.rng_seed, kSaltDataset}));
  const detail::RoomLayout layout{cfg.location_side_m};
  const double area = cfg.location_side_m * cfg.location_side_m;

  const auto centers =
      detail::feature_centers(cfg.n_targets, cfg.feature_dim, cfg.feature_cluster_spread);
  // Clutter feature box: the cluster lattice inflated by 3 spreads per side.
  double lattice_max = 0.0;
  for (const auto& c : centers) lattice_max = std::max(lattice_max, c.maxCoeff());
  const double box_lo = -3.0 * cfg.feature_cluster_spread;
  const double box_hi = lattice_max + 3.0 * cfg.feature_cluster_spread;

  Dataset dataset;
  dataset.env = Environment::uniform(cfg.n_locations, area);
  dataset.feature_dim = cfg.feature_dim;

  struct TrueTarget {
    LocationId location;
    Eigen::Vector2d position;
    Eigen::VectorXd feature;
  };
  std::vector<TrueTarget> state;
  state.reserve(static_cast<std::size_t>(cfg.n_targets));
  for (int j = 0; j < cfg.n_targets; ++j) {
    TrueTarget t;
    t.location = j % cfg.n_locations;
    t.position = layout.sample(t.location, rng);
    t.feature = centers[static_cast<std::size_t>(j)];
    state.push_back(t);

    // The tracker is initialized from observations, so the header carries a
    // noisy view of the initial state.
    InitialTarget init;
    init.label = j;
    init.location = t.location;
    init.position = layout.clip(
        t.location, t.position + Eigen::Vector2d(rng.normal(0.0, cfg.sigma_r_true),
                                                 rng.normal(0.0, cfg.sigma_r_true)));
    init.feature = t.feature;
    for (int d = 0; d < cfg.feature_dim; ++d)
      init.feature[d] += rng.normal(0.0, cfg.feature_cluster_spread);
    dataset.initial_targets.push_back(init);
  }

  GroundTruth truth;
  truth.labels.resize(static_cast<std::size_t>(cfg.n_targets));
  for (int j = 0; j < cfg.n_targets; ++j) truth.labels[static_cast<std::size_t>(j)] = j;

  for (int k = 1; k <= cfg.n_rounds; ++k) {
    const LocationId observed = (k - 1) % cfg.n_locations;

    // Move every target.
    for (auto& t : state) {
      if (rng.bernoulli(cfg.true_p_jump)) {
        t.location = rng.uniform_int(cfg.n_locations);
        t.position = layout.sample(t.location, rng);
      } else {
        t.position = layout.clip(
            t.location, t.position + Eigen::Vector2d(rng.normal(0.0, cfg.sigma_q_true),
                                                     rng.normal(0.0, cfg.sigma_q_true)));
      }
    }

    Round round;
    round.time_step = k;
    round.observed = observed;
    std::vector<TruthEntry> entries(static_cast<std::size_t>(cfg.n_targets));
    std::vector<int> origin;  // target label per measurement, -1 for clutter

    for (int j = 0; j < cfg.n_targets; ++j) {
      auto& entry = entries[static_cast<std::size_t>(j)];
      entry.location = state[static_cast<std::size_t>(j)].location;
      entry.position = state[static_cast<std::size_t>(j)].position;
      if (entry.location != observed || !rng.bernoulli(cfg.true_p_meas)) continue;
      Measurement m;
      m.location = observed;
      m.time_step = k;
      m.position = layout.clip(
          observed, entry.position + Eigen::Vector2d(rng.normal(0.0, cfg.sigma_r_true),
                                                     rng.normal(0.0, cfg.sigma_r_true)));
      m.feature = state[static_cast<std::size_t>(j)].feature;
      for (int d = 0; d < cfg.feature_dim; ++d)
        m.feature[d] += rng.normal(0.0, cfg.feature_cluster_spread);
      m.label = j;
      round.measurements.push_back(std::move(m));
      origin.push_back(j);
      entry.detected = true;
    }

    const int n_clutter = rng.poisson(cfg.clutter_rate);
    for (int c = 0; c < n_clutter; ++c) {
      Measurement m;
      m.location = observed;
      m.time_step = k;
      m.position = layout.sample(observed, rng);
      m.feature.resize(cfg.feature_dim);
      for (int d = 0; d < cfg.feature_dim; ++d)
        m.feature[d] = rng.uniform(box_lo, box_hi);
      round.measurements.push_back(std::move(m));
      origin.push_back(-1);
    }

    // Shuffle so measurement order carries no information.
    for (std::size_t i = round.measurements.size(); i > 1; --i) {
      const std::size_t r = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)));
      std::swap(round.measurements[i - 1], round.measurements[r]);
      std::swap(origin[i - 1], origin[r]);
    }
    for (std::size_t m = 0; m < origin.size(); ++m) {
      if (origin[m] < 0) continue;
      auto& entry = entries[static_cast<std::size_t>(origin[m])];
      entry.measurement = static_cast<int>(m);
      entry.measured_position = round.measurements[m].position;
    }

    dataset.rounds.push_back(std::move(round));
    truth.time_steps.push_back(k);
    truth.observed.push_back(observed);
    truth.rounds.push_back(std::move(entries));
  }

  dataset.validate();
  return {std::move(dataset), std::move(truth)};
}

enum class SweepAxis { kJumpRate, kTargets, kParticles, kGrid };

inline std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kJumpRate: return "jump_rate";
    case SweepAxis::kTargets: return "n_targets";
    case SweepAxis::kParticles: return "n_particles";
    case SweepAxis::kGrid: return "grid";
  }
  return "jump_rate";
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "jump_rate") return SweepAxis::kJumpRate;
  if (s == "n_targets") return SweepAxis::kTargets;
  if (s == "n_particles") return SweepAxis::kParticles;
  if (s == "grid") return SweepAxis::kGrid;
  throw ConfigError("unknown sweep axis '" + s + "'");
}

/// One tracker evaluation within a sweep: which dataset to generate and
/// which filter settings to override.
struct SweepRun {
  double axis_value = 0.0;
  double axis_value2 = 0.0;  // p_meas for the grid axis, unused otherwise
  int repeat = 0;
  int eval = 0;
  SimConfig sim;
  std::uint64_t eval_seed = 0;
  // Filter overrides; negative values mean "keep the base configuration".
  int num_particles = -1;
  double p_jump = -1.0;
  double p_meas = -1.0;
};

/// Expands a sweep into the full deterministic run list. Axes that vary
/// tracker settings only (particle count, the p_jump x p_meas grid) reuse
/// one dataset per repeat so the data is held fixed across values.
inline std::vector<SweepRun> sweep_manifest(const SimConfig& base, SweepAxis axis,
                                            const std::vector<double>& values,
                                            const std::vector<double>& values2 = {},
                                            int repeats_per_value = 3,
                                            int evals_per_sim = 10) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (axis == SweepAxis::kGrid && values2.empty())
    throw ConfigError("grid sweep needs a second value list");
  if (repeats_per_value < 1 || evals_per_sim < 1)
    throw ConfigError("sweep repeats and evals must be positive");

  const auto axis_id = static_cast<std::uint64_t>(axis);
  const bool shared_dataset =
      axis == SweepAxis::kParticles || axis == SweepAxis::kGrid;

  std::vector<SweepRun> runs;
  const std::vector<double> inner =
      axis == SweepAxis::kGrid ? values2 : std::vector<double>{0.0};
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t wi = 0; wi < inner.size(); ++wi) {
      for (int rep = 0; rep < repeats_per_value; ++rep) {
        SimConfig sim = base;
        switch (axis) {
          case SweepAxis::kJumpRate: sim.true_p_jump = values[vi]; break;
          case SweepAxis::kTargets:
            sim.n_targets = static_cast<int>(values[vi]);
            break;
          case SweepAxis::kParticles:
          case SweepAxis::kGrid: break;
        }
        sim.rng_seed = mix_seed({base.rng_seed, kSaltDataset, axis_id,
                                 shared_dataset ? 0 : vi,
                                 static_cast<std::uint64_t>(rep)});
        for (int ev = 0; ev < evals_per_sim; ++ev) {
          SweepRun run;
          run.axis_value = values[vi];
          run.repeat = rep;
          run.eval = ev;
          run.sim = sim;
          run.eval_seed = mix_seed({base.rng_seed, kSaltEval, axis_id, vi, wi,
                                    static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(ev)});
          switch (axis) {
            case SweepAxis::kJumpRate:
            case SweepAxis::kTargets: break;
            case SweepAxis::kParticles:
              run.num_particles = static_cast<int>(values[vi]);
              break;
            case SweepAxis::kGrid:
              run.p_jump = values[vi];
              run.axis_value2 = values2[wi];
              run.p_meas = values2[wi];
              break;
          }
          runs.push_back(run);
        }
      }
    }
  }
  return runs;
}

}  // namespace jumptrack
