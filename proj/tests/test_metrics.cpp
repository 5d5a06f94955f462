#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <random>

#include "jumptrack/baseline.hpp"
#include "jumptrack/metrics.hpp"
#include "test_support.hpp"

using namespace jumptrack;
using namespace jumptrack::testing;

namespace {

/// Brute-force gated matching: maximize the number of matched pairs, then
/// minimize the summed distance, by trying every injective assignment.
struct BruteResult {
  int matches = 0;
  double distance = 0.0;
};

void brute_recurse(const std::vector<LabeledPoint>& est,
                   const std::vector<LabeledPoint>& ann, double gate,
                   std::size_t e, std::vector<bool>& used, int matches,
                   double dist, BruteResult& best) {
  if (e == est.size()) {
    if (matches > best.matches ||
        (matches == best.matches && dist < best.distance))
      best = {matches, dist};
    return;
  }
  brute_recurse(est, ann, gate, e + 1, used, matches, dist, best);
  for (std::size_t a = 0; a < ann.size(); ++a) {
    if (used[a]) continue;
    const double d = (est[e].position - ann[a].position).norm();
    if (d > gate) continue;
    used[a] = true;
    brute_recurse(est, ann, gate, e + 1, used, matches + 1, dist + d, best);
    used[a] = false;
  }
}

BruteResult brute_force_match(const std::vector<LabeledPoint>& est,
                              const std::vector<LabeledPoint>& ann, double gate) {
  BruteResult best;
  best.matches = -1;
  std::vector<bool> used(ann.size(), false);
  brute_recurse(est, ann, gate, 0, used, 0, 0.0, best);
  return best;
}

LabeledPoint lp(int label, double x, double y) {
  return {label, Eigen::Vector2d(x, y)};
}

}  // namespace

TEST_CASE("gated hungarian assignment") {
  SECTION("picks the cheaper of the two pairings") {
    // Distances form the matrix [[0.1, 0.4], [0.4, 0.2]].
    std::vector<LabeledPoint> est = {lp(0, 0.0, 0.0), lp(1, 1.0, 0.0)};
    std::vector<LabeledPoint> ann = {lp(0, 0.1, 0.0), lp(1, 1.0, 0.2)};
    const MatchResult m = hungarian_assign(est, ann, 0.5);
    REQUIRE(m.matches.size() == 2);
    double total = 0.0;
    for (const auto& [e, a] : m.matches) {
      CHECK(e == a);
      total += (est[static_cast<std::size_t>(e)].position -
                ann[static_cast<std::size_t>(a)].position).norm();
    }
    CHECK(total == Catch::Approx(0.3).margin(1e-9));
  }

  SECTION("pairs beyond the gate stay unmatched") {
    const MatchResult m =
        hungarian_assign({lp(0, 0.0, 0.0)}, {lp(0, 0.6, 0.0)}, 0.5);
    CHECK(m.matches.empty());
    CHECK(m.unmatched_estimates == std::vector<int>{0});
    CHECK(m.unmatched_annotations == std::vector<int>{0});
  }

  SECTION("no estimates leaves every annotation unmatched") {
    const MatchResult m = hungarian_assign({}, {lp(0, 0.0, 0.0), lp(1, 1.0, 1.0)}, 0.5);
    CHECK(m.matches.empty());
    CHECK(m.unmatched_annotations.size() == 2);
  }

  SECTION("matches brute force on random instances up to 5x5") {
    std::mt19937_64 gen(71);
    std::uniform_real_distribution<double> coord(0.0, 2.0);
    std::uniform_int_distribution<int> size(0, 5);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<LabeledPoint> est, ann;
      const int ne = size(gen), na = size(gen);
      for (int i = 0; i < ne; ++i) est.push_back(lp(i, coord(gen), coord(gen)));
      for (int i = 0; i < na; ++i) ann.push_back(lp(i, coord(gen), coord(gen)));
      const double gate = std::uniform_real_distribution<double>(0.2, 1.5)(gen);

      const MatchResult m = hungarian_assign(est, ann, gate);
      double total = 0.0;
      for (const auto& [e, a] : m.matches) {
        const double d = (est[static_cast<std::size_t>(e)].position -
                          ann[static_cast<std::size_t>(a)].position).norm();
        REQUIRE(d <= gate);
        total += d;
      }
      const BruteResult expected = brute_force_match(est, ann, gate);
      REQUIRE(static_cast<int>(m.matches.size()) == expected.matches);
      REQUIRE(total == Catch::Approx(expected.distance).margin(1e-9));
    }
  }
}

TEST_CASE("mot evaluation") {
  SECTION("perfect tracking scores MOTA 1, MOTP 0") {
    std::vector<Frame> truth(5), est(5);
    for (int k = 0; k < 5; ++k) {
      truth[static_cast<std::size_t>(k)] = {k, {lp(0, 1.0, 1.0), lp(1, 3.0, 1.0)}};
      est[static_cast<std::size_t>(k)] = truth[static_cast<std::size_t>(k)];
    }
    const MotReport r = mot_evaluate(est, truth, 0.5);
    CHECK(r.mota == Catch::Approx(1.0));
    CHECK(r.motp_m == Catch::Approx(0.0));
    CHECK(r.total_ground_truth == 10);
  }

  SECTION("one miss and one false positive out of ten") {
    std::vector<Frame> truth(5), est(5);
    for (int k = 0; k < 5; ++k) {
      truth[static_cast<std::size_t>(k)] = {k, {lp(0, 1.0, 1.0), lp(1, 3.0, 1.0)}};
      est[static_cast<std::size_t>(k)] = truth[static_cast<std::size_t>(k)];
    }
    est[2].points[1] = lp(1, 9.0, 9.0);  // far off: one miss plus one false positive
    const MotReport r = mot_evaluate(est, truth, 0.5);
    CHECK(r.mota == Catch::Approx(0.8));
    CHECK(r.miss_rate == Catch::Approx(0.1));
    CHECK(r.false_positive_rate == Catch::Approx(0.1));
  }

  SECTION("permanently swapped labels count a mismatch every round") {
    std::vector<Frame> truth(4), est(4);
    for (int k = 0; k < 4; ++k) {
      truth[static_cast<std::size_t>(k)] = {k, {lp(0, 1.0, 1.0), lp(1, 3.0, 1.0)}};
      est[static_cast<std::size_t>(k)] = {k, {lp(1, 1.0, 1.0), lp(0, 3.0, 1.0)}};
    }
    const MotReport r = mot_evaluate(est, truth, 0.5);
    CHECK(r.mismatch_rate == Catch::Approx(1.0));
    CHECK(r.mota == Catch::Approx(0.0));
    long mm = 0;
    for (const FrameCounts& f : r.frames) mm += f.mismatches;
    CHECK(mm == 8);
  }

  SECTION("the MOTA identity holds on random scenarios") {
    std::mt19937_64 gen(73);
    std::uniform_real_distribution<double> coord(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Frame> truth, est;
      for (int k = 0; k < 6; ++k) {
        Frame t{k, {}}, e{k, {}};
        const int nt = static_cast<int>(gen() % 4);
        const int ne = static_cast<int>(gen() % 4);
        for (int i = 0; i < nt; ++i)
          t.points.push_back(lp(static_cast<int>(gen() % 3), coord(gen), coord(gen)));
        for (int i = 0; i < ne; ++i)
          e.points.push_back(lp(static_cast<int>(gen() % 3), coord(gen), coord(gen)));
        truth.push_back(t);
        est.push_back(e);
      }
      const MotReport r = mot_evaluate(est, truth, 0.5);
      long misses = 0, fps = 0, mms = 0;
      for (const FrameCounts& f : r.frames) {
        misses += f.misses;
        fps += f.false_positives;
        mms += f.mismatches;
      }
      if (r.total_ground_truth > 0) {
        REQUIRE(r.mota == Catch::Approx(1.0 - double(misses + fps + mms) /
                                                  double(r.total_ground_truth)));
      }
    }
  }

  SECTION("permuting the estimates never changes the report") {
    std::mt19937_64 gen(79);
    std::uniform_real_distribution<double> coord(0.0, 3.0);
    std::vector<Frame> truth, est;
    for (int k = 0; k < 5; ++k) {
      Frame t{k, {}}, e{k, {}};
      for (int i = 0; i < 4; ++i) {
        t.points.push_back(lp(i, coord(gen), coord(gen)));
        e.points.push_back(lp(i, coord(gen), coord(gen)));
      }
      truth.push_back(t);
      est.push_back(e);
    }
    const MotReport base = mot_evaluate(est, truth, 0.7);
    std::vector<Frame> shuffled = est;
    for (Frame& f : shuffled)
      std::shuffle(f.points.begin(), f.points.end(), gen);
    const MotReport perm = mot_evaluate(shuffled, truth, 0.7);
    CHECK(perm.mota == Catch::Approx(base.mota));
    CHECK(perm.motp_m == Catch::Approx(base.motp_m));
    CHECK(perm.mismatch_rate == Catch::Approx(base.mismatch_rate));
  }

  SECTION("misaligned rounds are rejected") {
    std::vector<Frame> truth = {{0, {}}, {1, {}}};
    std::vector<Frame> est = {{0, {}}, {2, {}}};
    CHECK_THROWS_AS(mot_evaluate(est, truth, 0.5), ConfigError);
  }
}

namespace {

/// Hand-built dataset for the baseline: two rooms observed alternately.
Dataset baseline_dataset() {
  Dataset d;
  d.env = Environment::uniform(2, 20.0);
  d.feature_dim = 1;
  d.initial_targets = {{0, 0, Eigen::Vector2d(1.0, 1.0), feat1(0.0)},
                       {1, 1, Eigen::Vector2d(3.0, 1.0), feat1(5.0)}};
  return d;
}

Round make_round(int k, LocationId observed,
                 std::vector<std::tuple<double, double, double, int>> ms) {
  Round r;
  r.time_step = k;
  r.observed = observed;
  for (const auto& [x, y, f, label] : ms) {
    Measurement m = make_measurement(x, y, feat1(f), observed, k);
    if (label >= 0) m.label = label;
    r.measurements.push_back(m);
  }
  return r;
}

}  // namespace

TEST_CASE("movable/absent baseline tracker") {
  SECTION("static objects with exact detections stay put") {
    Dataset d = baseline_dataset();
    for (int k = 1; k <= 6; ++k) {
      const LocationId obs = (k - 1) % 2;
      if (obs == 0)
        d.rounds.push_back(make_round(k, 0, {{1.0, 1.0, 0.0, 0}}));
      else
        d.rounds.push_back(make_round(k, 1, {{3.0, 1.0, 5.0, 1}}));
    }
    const auto frames = baseline_track(d, {1.0, 0.3});
    for (std::size_t k = 0; k < frames.size(); ++k) {
      REQUIRE(frames[k].points.size() == 1);
      const int expect_label = static_cast<int>(k % 2);
      CHECK(frames[k].points[0].label == expect_label);
      CHECK(frames[k].points[0].position.x() ==
            Catch::Approx(expect_label == 0 ? 1.0 : 3.0));
    }
    const auto states = baseline_track_states(d, {1.0, 0.3});
    for (const auto& round_states : states)
      for (const BaselineState& s : round_states) CHECK(s.movable);
  }

  SECTION("a vanished object is re-acquired by feature elsewhere") {
    Dataset d = baseline_dataset();
    // Object 0 leaves room 0, later shows up in room 1.
    d.rounds.push_back(make_round(1, 0, {}));  // gone from room 0 -> absent
    d.rounds.push_back(make_round(2, 1, {{2.0, 2.0, 0.05, 0}, {3.0, 1.0, 5.0, 1}}));
    const auto states = baseline_track_states(d, {1.0, 0.3});
    CHECK_FALSE(states[0][0].movable);
    CHECK(states[1][0].movable);
    CHECK(states[1][0].location == 1);
    CHECK(states[1][0].position.isApprox(Eigen::Vector2d(2.0, 2.0)));
  }

  SECTION("identical twins swapping rooms stay mislabeled") {
    Dataset d = baseline_dataset();
    d.initial_targets[1].feature = feat1(0.0);  // same appearance as object 0
    // Both objects move within their rooms (beyond the static distance), so
    // each round the tracker re-matches by feature alone and the greedy
    // order hands object 0 whatever it sees first.
    d.rounds.push_back(make_round(1, 0, {{2.2, 2.0, 0.0, 1}}));  // actually object 1
    d.rounds.push_back(make_round(2, 1, {{4.0, 2.0, 0.0, 0}}));  // actually object 0
    d.rounds.push_back(make_round(3, 0, {{2.2, 2.0, 0.0, 1}}));
    d.rounds.push_back(make_round(4, 1, {{4.0, 2.0, 0.0, 0}}));
    const auto frames = baseline_track(d, {1.0, 0.3});
    const MotReport r = mot_evaluate(
        frames,
        {Frame{1, {lp(1, 2.2, 2.0)}}, Frame{2, {lp(0, 4.0, 2.0)}},
         Frame{3, {lp(1, 2.2, 2.0)}}, Frame{4, {lp(0, 4.0, 2.0)}}},
        0.5);
    CHECK(r.mismatch_rate > 0.5);
  }
}

TEST_CASE("threshold search") {
  SECTION("a single candidate is returned unchanged") {
    Dataset d = baseline_dataset();
    d.rounds.push_back(make_round(1, 0, {{1.0, 1.0, 0.0, 0}}));
    std::vector<Frame> truth = {Frame{1, {lp(0, 1.0, 1.0)}}};
    CHECK(threshold_search({{d, truth}}, {0.7}) == Catch::Approx(0.7));
  }

  SECTION("noisy features need a threshold strictly between 0 and infinity") {
    // Object 0 moves within its room each round (feature noise ~0.2), and
    // clutter with mid-range features shows up when it is absent. A tiny
    // threshold never re-acquires, a huge one swallows clutter.
    Dataset d = baseline_dataset();
    d.rounds.push_back(make_round(1, 0, {{1.8, 1.9, 0.2, 0}}));
    d.rounds.push_back(make_round(2, 1, {{3.0, 1.0, 4.9, 1}}));
    d.rounds.push_back(make_round(3, 0, {{2.6, 2.7, -0.15, 0}, {0.5, 0.5, 2.4, -1}}));
    d.rounds.push_back(make_round(4, 1, {{3.0, 1.0, 5.1, 1}}));
    d.rounds.push_back(make_round(5, 0, {{0.8, 0.6, 2.5, -1}}));  // object 0 left
    d.rounds.push_back(make_round(6, 1, {{3.0, 1.0, 5.0, 1}, {1.5, 1.5, 0.1, 0}}));
    d.rounds.push_back(make_round(7, 0, {{0.7, 0.7, 2.6, -1}}));
    d.rounds.push_back(make_round(8, 1, {{3.1, 1.1, 5.0, 1}, {1.4, 1.6, -0.1, 0}}));

    std::vector<Frame> truth;
    for (const Round& r : d.rounds) {
      Frame f{r.time_step, {}};
      for (const Measurement& m : r.measurements)
        if (m.label) f.points.push_back({*m.label, m.position});
      truth.push_back(f);
    }

    const std::vector<std::pair<Dataset, std::vector<Frame>>> data = {{d, truth}};
    const double best = threshold_search(data, {0.01, 1.0, 100.0});
    CHECK(best == Catch::Approx(1.0));

    // The scan is exhaustive, so the interior optimum beats both extremes.
    auto mota_at = [&](double threshold) {
      return mot_evaluate(baseline_track(d, {threshold, 0.3}), truth, 0.5).mota;
    };
    CHECK(mota_at(1.0) > mota_at(0.01));
    CHECK(mota_at(1.0) > mota_at(100.0));
  }

  SECTION("ties pick the smaller threshold") {
    Dataset d = baseline_dataset();
    d.rounds.push_back(make_round(1, 0, {{1.0, 1.0, 0.0, 0}}));
    std::vector<Frame> truth = {Frame{1, {lp(0, 1.0, 1.0)}}};
    // Both candidates behave identically on a static scenario.
    CHECK(threshold_search({{d, truth}}, {2.0, 0.9}) == Catch::Approx(0.9));
  }
}
