#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "jumptrack/likelihood.hpp"
#include "jumptrack/prior.hpp"
#include "jumptrack/rng.hpp"
#include "jumptrack/types.hpp"

namespace jumptrack {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class Container>
double logsumexp(const Container& values) {
  double max_v = kNegInf;
  for (double v : values) max_v = std::max(max_v, v);
  if (max_v == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max_v);
  return max_v + std::log(sum);
}

/// One hypothesis row of a per-target proposal: a (u, l, c) cell of the
/// transition prior, expanded per measurement for the c = m cells.
struct ProposalRow {
  TargetAssociation assoc;
  double log_prior = kNegInf;
  double log_point = 0.0;  // point likelihood; meaningful for c = m rows only
};

/// Discrete proposal distribution over one target's assignment rows, with
/// weights prior x likelihood. Rows with zero prior are not materialized.
///
/// Two weightings of the same rows are kept: the proposal weighting uses the
/// epsilon pseudo-likelihood on eps rows (the independence-factored scheme),
/// the conditional weighting is exact relative to the joint likelihood and
/// expresses point likelihoods as ratios against the clutter density.
struct IndividualProposal {
  std::vector<ProposalRow> rows;
  double log_eps_pseudo = 0.0;
  double log_clutter = 0.0;

  std::vector<double> log_w;     // proposal scale, per row
  std::vector<double> log_cond;  // conditional (clutter-ratio) scale, per row
  std::vector<double> exp_cond;  // exp(log_cond - max log_cond), for pair blocks

  int size() const { return static_cast<int>(rows.size()); }

  double log_sum_weights() const { return logsumexp(log_w); }

  void finalize() {
    log_w.resize(rows.size());
    log_cond.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const ProposalRow& row = rows[r];
      if (row.assoc.assigned()) {
        log_w[r] = row.log_prior + row.log_point;
        log_cond[r] = row.log_prior + row.log_point - log_clutter;
      } else {
        log_w[r] = row.log_prior + log_eps_pseudo;
        log_cond[r] = row.log_prior;
      }
    }
    double max_cond = kNegInf;
    for (double v : log_cond) max_cond = std::max(max_cond, v);
    exp_cond.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      exp_cond[r] = std::exp(log_cond[r] - max_cond);
    if (logsumexp(log_w) == kNegInf)
      throw NumericError("degenerate proposal: all rows have zero weight");
  }
};

/// Per-particle bundle of proposals for one observation round.
struct ProposalSet {
  std::vector<IndividualProposal> targets;
  double log_clutter = 0.0;  // clutter density of the observed location
  int m_count = 0;
};

inline IndividualProposal build_individual_proposal(
    const TargetEstimate& target, const Round& round, int n_targets,
    const FilterParams& params, const Environment& env) {
  const int m_count = static_cast<int>(round.measurements.size());
  const PriorCells cells =
      transition_prior(target.location, round.observed, m_count, env, params);

  IndividualProposal prop;
  prop.log_clutter = log_clutter_density(round.observed, params, env);
  // With no measurements there is no m-row to balance against; the eps rows
  // then carry the exact (empty-product) likelihood of one.
  prop.log_eps_pseudo =
      m_count > 0 ? log_epsilon_pseudo_likelihood(target, n_targets, params,
                                                  env.area(round.observed))
                  : 0.0;

  auto add_meas_rows = [&](double cell, bool jumped, LocationId loc) {
    if (cell <= 0.0) return;
    for (int m = 0; m < m_count; ++m) {
      const Measurement& y = round.measurements[static_cast<std::size_t>(m)];
      ProposalRow row;
      row.assoc = TargetAssociation{m, jumped, loc};
      row.log_prior = std::log(cell);
      row.log_point = jumped
                          ? log_point_likelihood_jump(target, y, params, env)
                          : log_point_likelihood_no_jump(target, y, params);
      prop.rows.push_back(row);
    }
  };
  auto add_eps_row = [&](double cell, bool jumped, LocationId loc) {
    if (cell <= 0.0) return;
    ProposalRow row;
    row.assoc = TargetAssociation{kNoMeasurement, jumped, loc};
    row.log_prior = std::log(cell);
    prop.rows.push_back(row);
  };

  add_meas_rows(cells.no_jump_meas, false, target.location);
  add_eps_row(cells.no_jump_eps, false, target.location);
  add_meas_rows(cells.jump_obs_meas, true, round.observed);
  add_eps_row(cells.jump_obs_eps, true, round.observed);
  add_eps_row(cells.jump_unknown_eps, true, kUnknownLocation);

  prop.finalize();
  return prop;
}

inline ProposalSet build_proposals(const std::vector<TargetEstimate>& targets,
                                   const Round& round, const FilterParams& params,
                                   const Environment& env) {
  ProposalSet set;
  set.m_count = static_cast<int>(round.measurements.size());
  set.log_clutter = log_clutter_density(round.observed, params, env);
  set.targets.reserve(targets.size());
  const int n = static_cast<int>(targets.size());
  for (const TargetEstimate& t : targets)
    set.targets.push_back(build_individual_proposal(t, round, n, params, env));
  return set;
}

inline Association association_from_rows(const ProposalSet& set,
                                         const std::vector<int>& rows) {
  Association assoc(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j)
    assoc[j] = set.targets[j].rows[static_cast<std::size_t>(rows[j])].assoc;
  return assoc;
}

/// Draws a conflict-free joint assignment from the independence-factored
/// proposal: sample every target independently and reject joint draws where
/// two targets claim the same measurement. After max_retries the draw falls
/// back to sampling targets in random order, each restricted to rows that do
/// not conflict with the ones already drawn.
inline std::vector<int> rejection_sample_rows(const ProposalSet& set, Rng& rng,
                                              int max_retries = 1000) {
  const std::size_t n = set.targets.size();
  std::vector<int> rows(n, 0);
  std::vector<int> claims(static_cast<std::size_t>(set.m_count), 0);

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::fill(claims.begin(), claims.end(), 0);
    bool conflict = false;
    for (std::size_t j = 0; j < n; ++j) {
      const int r = rng.categorical_log(set.targets[j].log_w);
      rows[j] = r;
      const TargetAssociation& a = set.targets[j].rows[static_cast<std::size_t>(r)].assoc;
      if (a.assigned() && ++claims[static_cast<std::size_t>(a.measurement)] > 1)
        conflict = true;
    }
    if (!conflict) return rows;
  }

  // Fallback: sequential conflict-avoiding sampling in random order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)))]);

  std::fill(claims.begin(), claims.end(), 0);
  std::vector<double> masked;
  for (std::size_t j : order) {
    const IndividualProposal& prop = set.targets[j];
    masked.assign(prop.log_w.begin(), prop.log_w.end());
    for (std::size_t r = 0; r < masked.size(); ++r) {
      const TargetAssociation& a = prop.rows[r].assoc;
      if (a.assigned() && claims[static_cast<std::size_t>(a.measurement)] > 0)
        masked[r] = kNegInf;
    }
    const int r = rng.categorical_log(masked);
    if (r < 0) throw NumericError("conflict-avoiding fallback found no row");
    rows[j] = r;
    const TargetAssociation& a = prop.rows[static_cast<std::size_t>(r)].assoc;
    if (a.assigned()) ++claims[static_cast<std::size_t>(a.measurement)];
  }
  return rows;
}

inline Association rejection_sample(const ProposalSet& set, Rng& rng,
                                    int max_retries = 1000) {
  return association_from_rows(set, rejection_sample_rows(set, rng, max_retries));
}

/// Joint conditional over a pair of targets' rows given every other target's
/// current assignment. combos lists (row_a, row_b) with positive conditional
/// probability; weights are linear, shift-normalized per pair.
struct PairConditional {
  std::vector<std::pair<int, int>> combos;
  std::vector<double> weights;
};

/// Blocked Gibbs chain over the optimal importance distribution
/// q(c) proportional to L(Y | c) p(c | previous locations). Each update
/// redraws two random targets jointly from their exact conditional.
class GibbsChain {
 public:
  GibbsChain(const ProposalSet& set, std::vector<int> init_rows)
      : set_(&set), rows_(std::move(init_rows)),
        claims_(static_cast<std::size_t>(set.m_count), 0) {
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const TargetAssociation& a = row(j).assoc;
      if (a.assigned()) ++claims_[static_cast<std::size_t>(a.measurement)];
    }
  }

  const std::vector<int>& rows() const { return rows_; }
  Association association() const { return association_from_rows(*set_, rows_); }

  /// log of the joint likelihood of the current state expressed as a ratio
  /// against the all-clutter likelihood.
  double log_likelihood_ratio() const {
    double sum = 0.0;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      const ProposalRow& r = row(j);
      if (r.assoc.assigned()) sum += r.log_point - set_->log_clutter;
    }
    return sum;
  }

  PairConditional pair_conditional(int a, int b) const {
    PairConditional cond;
    const IndividualProposal& pa = set_->targets[static_cast<std::size_t>(a)];
    const IndividualProposal& pb = set_->targets[static_cast<std::size_t>(b)];
    cond.combos.reserve(pa.rows.size() * pb.rows.size());
    for (int ra = 0; ra < pa.size(); ++ra) {
      const TargetAssociation& aa = pa.rows[static_cast<std::size_t>(ra)].assoc;
      if (aa.assigned() && claimed_by_others(aa.measurement, a, b)) continue;
      for (int rb = 0; rb < pb.size(); ++rb) {
        const TargetAssociation& ab = pb.rows[static_cast<std::size_t>(rb)].assoc;
        if (ab.assigned() &&
            (claimed_by_others(ab.measurement, a, b) ||
             (aa.assigned() && ab.measurement == aa.measurement)))
          continue;
        cond.combos.emplace_back(ra, rb);
        cond.weights.push_back(pa.exp_cond[static_cast<std::size_t>(ra)] *
                               pb.exp_cond[static_cast<std::size_t>(rb)]);
      }
    }
    return cond;
  }

  /// One blocked update: pick two distinct random targets (or the single
  /// target when N = 1) and redraw their joint assignment.
  void blocked_update(Rng& rng) {
    const int n = static_cast<int>(rows_.size());
    if (n == 1) {
      update_single(0, rng);
      return;
    }
    const int a = rng.uniform_int(n);
    int b = rng.uniform_int(n - 1);
    if (b >= a) ++b;
    update_pair(a, b, rng);
  }

  void update_pair(int a, int b, Rng& rng) {
    const IndividualProposal& pa = set_->targets[static_cast<std::size_t>(a)];
    const IndividualProposal& pb = set_->targets[static_cast<std::size_t>(b)];
    scratch_combos_.clear();
    scratch_weights_.clear();
    double total = 0.0;
    for (int ra = 0; ra < pa.size(); ++ra) {
      const TargetAssociation& aa = pa.rows[static_cast<std::size_t>(ra)].assoc;
      if (aa.assigned() && claimed_by_others(aa.measurement, a, b)) continue;
      const double wa = pa.exp_cond[static_cast<std::size_t>(ra)];
      for (int rb = 0; rb < pb.size(); ++rb) {
        const TargetAssociation& ab = pb.rows[static_cast<std::size_t>(rb)].assoc;
        if (ab.assigned() &&
            (claimed_by_others(ab.measurement, a, b) ||
             (aa.assigned() && ab.measurement == aa.measurement)))
          continue;
        const double w = wa * pb.exp_cond[static_cast<std::size_t>(rb)];
        scratch_combos_.emplace_back(ra, rb);
        scratch_weights_.push_back(w);
        total += w;
      }
    }
    if (!(total > 0.0)) return;  // degenerate conditional: keep current block
    double u = rng.uniform() * total;
    std::size_t pick = scratch_weights_.size() - 1;
    for (std::size_t i = 0; i < scratch_weights_.size(); ++i) {
      u -= scratch_weights_[i];
      if (u <= 0.0) {
        pick = i;
        break;
      }
    }
    set_row(static_cast<std::size_t>(a), scratch_combos_[pick].first);
    set_row(static_cast<std::size_t>(b), scratch_combos_[pick].second);
  }

  void update_single(int j, Rng& rng) {
    const IndividualProposal& prop = set_->targets[static_cast<std::size_t>(j)];
    std::vector<double> masked(prop.log_cond);
    for (std::size_t r = 0; r < masked.size(); ++r) {
      const TargetAssociation& a = prop.rows[r].assoc;
      if (a.assigned() && claimed_by_others(a.measurement, j, j))
        masked[r] = kNegInf;
    }
    const int r = rng.categorical_log(masked);
    if (r >= 0) set_row(static_cast<std::size_t>(j), r);
  }

 private:
  const ProposalRow& row(std::size_t j) const {
    return set_->targets[j].rows[static_cast<std::size_t>(rows_[j])];
  }

  bool claimed_by_others(int m, int a, int b) const {
    int c = claims_[static_cast<std::size_t>(m)];
    const TargetAssociation& aa = row(static_cast<std::size_t>(a)).assoc;
    if (aa.assigned() && aa.measurement == m) --c;
    if (b != a) {
      const TargetAssociation& ab = row(static_cast<std::size_t>(b)).assoc;
      if (ab.assigned() && ab.measurement == m) --c;
    }
    return c > 0;
  }

  void set_row(std::size_t j, int r) {
    const TargetAssociation& old_a = row(j).assoc;
    if (old_a.assigned()) --claims_[static_cast<std::size_t>(old_a.measurement)];
    rows_[j] = r;
    const TargetAssociation& new_a = row(j).assoc;
    if (new_a.assigned()) ++claims_[static_cast<std::size_t>(new_a.measurement)];
  }

  const ProposalSet* set_;
  std::vector<int> rows_;
  std::vector<int> claims_;
  std::vector<std::pair<int, int>> scratch_combos_;
  std::vector<double> scratch_weights_;
};

/// Draws one assignment from q(c) by Gibbs sampling: initialized from a
/// rejection-sampling draw, then burn_in blocked updates.
inline GibbsChain gibbs_chain_burned_in(const ProposalSet& set, Rng& rng,
                                        int burn_in) {
  GibbsChain chain(set, rejection_sample_rows(set, rng));
  for (int i = 0; i < burn_in; ++i) chain.blocked_update(rng);
  return chain;
}

inline Association gibbs_sample(const ProposalSet& set, Rng& rng, int burn_in) {
  return gibbs_chain_burned_in(set, rng, burn_in).association();
}

/// Harmonic-mean estimate of the normalization constant
/// Z = sum_c L(Y | c) p(c | .) = 1 / E_q[1 / L(Y | c)], from n_samples more
/// iterations of an already burned-in chain. Returns log Z.
inline double estimate_log_z_gibbs(GibbsChain& chain, const ProposalSet& set,
                                   Rng& rng, int n_samples) {
  std::vector<double> neg_log_l(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    chain.blocked_update(rng);
    neg_log_l[static_cast<std::size_t>(i)] = -chain.log_likelihood_ratio();
  }
  const double log_mean_inv = logsumexp(neg_log_l) - std::log(n_samples);
  return -log_mean_inv + set.m_count * set.log_clutter;
}

/// Independence-factored estimate of the normalization constant: the product
/// over targets of each proposal's unnormalized weight sum. Returns log Z.
/// Exact when the mutual-exclusion constraint never binds (N = 1); an
/// overestimate when targets compete for the same measurements.
inline double estimate_log_z_independent(const ProposalSet& set) {
  double sum = 0.0;
  for (const IndividualProposal& prop : set.targets) sum += prop.log_sum_weights();
  return sum;
}

}  // namespace jumptrack
