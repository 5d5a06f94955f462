#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jumptrack/metrics.hpp"
#include "jumptrack/types.hpp"

namespace jumptrack {

/// Deterministic movable/absent tracker used as a comparison baseline.
///
/// Every tracked object sits in one of two sets. A movable object whose
/// location is being observed is kept if some detection lies within
/// static_distance_m of its last position (the stand-in for "the detector
/// saw it static"). Otherwise it competes, together with all absent
/// objects, for the remaining detections by feature distance: a match below
/// feature_threshold re-acquires the object at the detection, anything else
/// drops it into the absent set.
struct BaselineConfig {
  double feature_threshold = 1.5;
  double static_distance_m = 0.3;
};

/// Snapshot of one baseline object after a round.
struct BaselineState {
  int label = 0;
  bool movable = true;
  LocationId location = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// Runs the baseline over a dataset, returning every object's state after
/// each round.
inline std::vector<std::vector<BaselineState>> baseline_track_states(
    const Dataset& dataset, const BaselineConfig& config) {
  struct Object {
    int label;
    LocationId location;
    Eigen::Vector2d position;
    Eigen::VectorXd feature;
    bool movable = true;
  };

  std::vector<Object> objects;
  objects.reserve(dataset.initial_targets.size());
  for (const InitialTarget& t : dataset.initial_targets)
    objects.push_back({t.label, t.location, t.position, t.feature, true});

  std::vector<std::vector<BaselineState>> history;
  history.reserve(dataset.rounds.size());
  for (const Round& round : dataset.rounds) {
    const auto& ys = round.measurements;
    std::vector<bool> explained(ys.size(), false);

    // Pass 1: movable objects here that stayed put keep their track.
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      Object& obj = objects[i];
      if (!obj.movable || obj.location != round.observed) continue;
      int best = -1;
      double best_d = config.static_distance_m;
      for (std::size_t m = 0; m < ys.size(); ++m) {
        if (explained[m]) continue;
        const double d = (ys[m].position - obj.position).norm();
        if (d <= best_d) {
          best_d = d;
          best = static_cast<int>(m);
        }
      }
      if (best >= 0) {
        explained[static_cast<std::size_t>(best)] = true;
        obj.position = ys[static_cast<std::size_t>(best)].position;
        obj.feature = ys[static_cast<std::size_t>(best)].feature;
      } else {
        pending.push_back(i);
      }
    }

    // Pass 2: moved and absent objects re-match by feature alone, greedily
    // in object order.
    std::vector<std::size_t> candidates = pending;
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (!objects[i].movable) candidates.push_back(i);
    std::sort(candidates.begin(), candidates.end());

    for (std::size_t i : candidates) {
      Object& obj = objects[i];
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < ys.size(); ++m) {
        if (explained[m]) continue;
        const double d = (ys[m].feature - obj.feature).norm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(m);
        }
      }
      if (best >= 0 && best_d < config.feature_threshold) {
        explained[static_cast<std::size_t>(best)] = true;
        obj.movable = true;
        obj.location = round.observed;
        obj.position = ys[static_cast<std::size_t>(best)].position;
        obj.feature = ys[static_cast<std::size_t>(best)].feature;
      } else {
        obj.movable = false;
      }
    }

    std::vector<BaselineState> states;
    states.reserve(objects.size());
    for (const Object& obj : objects)
      states.push_back({obj.label, obj.movable, obj.location, obj.position});
    history.push_back(std::move(states));
  }
  return history;
}

/// Per-round estimate frames for evaluation: the movable objects located in
/// the observed location (the same framing applied to filter tracks).
inline std::vector<Frame> baseline_track(const Dataset& dataset,
                                         const BaselineConfig& config) {
  const auto history = baseline_track_states(dataset, config);
  std::vector<Frame> frames;
  frames.reserve(history.size());
  for (std::size_t k = 0; k < history.size(); ++k) {
    Frame frame;
    frame.time_step = dataset.rounds[k].time_step;
    for (const BaselineState& s : history[k])
      if (s.movable && s.location == dataset.rounds[k].observed)
        frame.points.push_back({s.label, s.position});
    frames.push_back(std::move(frame));
  }
  return frames;
}

/// Picks the feature threshold maximizing mean MOTA over the given datasets;
/// ties resolve to the smaller threshold.
inline double threshold_search(
    const std::vector<std::pair<Dataset, std::vector<Frame>>>& datasets_with_truth,
    const std::vector<double>& candidates, double static_distance_m = 0.3,
    double gate_m = 0.5) {
  if (candidates.empty()) throw ConfigError("no candidate thresholds");
  if (datasets_with_truth.empty()) throw ConfigError("no datasets");

  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());

  double best_threshold = sorted.front();
  double best_mota = -std::numeric_limits<double>::infinity();
  for (double threshold : sorted) {
    double mean_mota = 0.0;
    for (const auto& [dataset, truth] : datasets_with_truth) {
      const auto frames = baseline_track(dataset, {threshold, static_distance_m});
      mean_mota += mot_evaluate(frames, truth, gate_m).mota;
    }
    mean_mota /= static_cast<double>(datasets_with_truth.size());
    if (mean_mota > best_mota) {
      best_mota = mean_mota;
      best_threshold = threshold;
    }
  }
  return best_threshold;
}

}  // namespace jumptrack
