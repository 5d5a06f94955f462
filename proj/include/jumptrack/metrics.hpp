#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jumptrack/errors.hpp"

namespace jumptrack {

struct LabeledPoint {
  int label = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

/// One evaluation frame: the labeled points visible at one time step.
struct Frame {
  int time_step = 0;
  std::vector<LabeledPoint> points;
};

struct MatchResult {
  std::vector<std::pair<int, int>> matches;  // (estimate index, annotation index)
  std::vector<int> unmatched_estimates;
  std::vector<int> unmatched_annotations;
};

namespace detail {

// Cost assigned to gated-out or padded pairs. Any real match is cheaper than
// leaving both sides unmatched, so minimizing total cost maximizes the number
// of gated matches first and the summed distance second.
inline constexpr double kGatedCost = 1e6;

/// O(n^3) Hungarian algorithm (Kuhn's algorithm with potentials) on a dense
/// square cost matrix. Returns the column matched to each row.
inline std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(n + 1), 0);
  std::vector<int> way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0)
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace detail

/// Minimum-total-distance matching between estimates and annotations among
/// pairs closer than gate_m; pairs beyond the gate never match.
inline MatchResult hungarian_assign(const std::vector<LabeledPoint>& estimates,
                                    const std::vector<LabeledPoint>& annotations,
                                    double gate_m = 0.5) {
  MatchResult result;
  const int ne = static_cast<int>(estimates.size());
  const int na = static_cast<int>(annotations.size());
  const int n = std::max(ne, na);
  if (n == 0) return result;

  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(n), detail::kGatedCost));
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < na; ++a) {
      const double d =
          (estimates[static_cast<std::size_t>(e)].position -
           annotations[static_cast<std::size_t>(a)].position).norm();
      if (d <= gate_m)
        cost[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)] = d;
    }
  }

  const std::vector<int> row_to_col = detail::solve_assignment(cost);
  std::vector<bool> ann_matched(static_cast<std::size_t>(na), false);
  for (int e = 0; e < ne; ++e) {
    const int a = row_to_col[static_cast<std::size_t>(e)];
    if (a >= 0 && a < na &&
        cost[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)] < detail::kGatedCost) {
      result.matches.emplace_back(e, a);
      ann_matched[static_cast<std::size_t>(a)] = true;
    } else {
      result.unmatched_estimates.push_back(e);
    }
  }
  for (int a = 0; a < na; ++a)
    if (!ann_matched[static_cast<std::size_t>(a)])
      result.unmatched_annotations.push_back(a);
  return result;
}

struct FrameCounts {
  int time_step = 0;
  int matches = 0;
  int misses = 0;
  int false_positives = 0;
  int mismatches = 0;
  double distance_sum = 0.0;
};

/// CLEAR-MOT style report. Every wrongly labeled matched observation counts
/// as a mismatch, not only the frame where a swap first occurs.
struct MotReport {
  double motp_m = 0.0;
  double miss_rate = 0.0;
  double false_positive_rate = 0.0;
  double mismatch_rate = 0.0;
  double mota = 1.0;
  long total_ground_truth = 0;
  std::vector<FrameCounts> frames;
};

inline MotReport mot_evaluate(const std::vector<Frame>& estimates,
                              const std::vector<Frame>& truth,
                              double gate_m = 0.5) {
  if (estimates.size() != truth.size())
    throw ConfigError("estimate and truth round counts differ");

  MotReport report;
  long misses = 0, fps = 0, mismatches = 0, matches = 0;
  double dist_sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (estimates[k].time_step != truth[k].time_step)
      throw ConfigError("estimate and truth rounds misaligned");
    const MatchResult m =
        hungarian_assign(estimates[k].points, truth[k].points, gate_m);

    FrameCounts fc;
    fc.time_step = truth[k].time_step;
    fc.matches = static_cast<int>(m.matches.size());
    fc.misses = static_cast<int>(m.unmatched_annotations.size());
    fc.false_positives = static_cast<int>(m.unmatched_estimates.size());
    for (const auto& [e, a] : m.matches) {
      const LabeledPoint& est = estimates[k].points[static_cast<std::size_t>(e)];
      const LabeledPoint& ann = truth[k].points[static_cast<std::size_t>(a)];
      fc.distance_sum += (est.position - ann.position).norm();
      if (est.label != ann.label) ++fc.mismatches;
    }
    misses += fc.misses;
    fps += fc.false_positives;
    mismatches += fc.mismatches;
    matches += fc.matches;
    dist_sum += fc.distance_sum;
    report.total_ground_truth += static_cast<long>(truth[k].points.size());
    report.frames.push_back(fc);
  }

  report.motp_m = matches > 0 ? dist_sum / static_cast<double>(matches) : 0.0;
  if (report.total_ground_truth > 0) {
    const double total = static_cast<double>(report.total_ground_truth);
    report.miss_rate = static_cast<double>(misses) / total;
    report.false_positive_rate = static_cast<double>(fps) / total;
    report.mismatch_rate = static_cast<double>(mismatches) / total;
    report.mota = 1.0 - static_cast<double>(misses + fps + mismatches) / total;
  }
  return report;
}

}  // namespace jumptrack
