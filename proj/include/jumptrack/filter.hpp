#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "jumptrack/gaussian.hpp"
#include "jumptrack/sampler.hpp"
#include "jumptrack/types.hpp"

namespace jumptrack {

/// One particle: the Kalman beliefs of all N targets plus a log weight. The
/// target count is fixed for the whole run (closed world).
struct Particle {
  std::vector<TargetEstimate> targets;
  double log_weight = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  int time_step = 0;
  int resample_count = 0;

  int num_targets() const {
    return particles.empty() ? 0 : static_cast<int>(particles.front().targets.size());
  }
};

/// Spatial posterior of one target: a Gaussian mixture over the particles, a
/// marginal over discrete locations and a point estimate for evaluation.
struct PosteriorSummary {
  struct Component {
    double weight;
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
  };
  std::vector<Component> components;
  std::map<LocationId, double> location_marginal;
  LocationId map_location = kUnknownLocation;
  std::optional<Eigen::Vector2d> point_estimate;
};

namespace detail {

inline void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
  n_threads = std::max(1, std::min(n_threads, n));
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t] {
      for (int i = t; i < n; i += n_threads) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace detail

/// All particles start identical: the given positions and features with
/// one-measurement covariances, uniform weights.
inline ParticleSet init(const std::vector<InitialTarget>& targets,
                        const FilterParams& params, const Environment& env) {
  if (targets.empty()) throw ConfigError("need at least one initial target");
  params.validate();
  env.validate();

  Particle proto;
  proto.targets.reserve(targets.size());
  for (const InitialTarget& t : targets) {
    if (!env.valid(t.location))
      throw ConfigError("initial target in invalid location");
    if (t.feature.size() != params.feature_meas_cov.rows())
      throw ConfigError("initial feature dimension does not match feature_meas_cov");
    TargetEstimate est;
    est.spatial_mean = t.position;
    est.spatial_cov = params.spatial_meas_cov();
    est.feature_mean = t.feature;
    est.feature_cov = params.feature_meas_cov;
    est.location = t.location;
    proto.targets.push_back(est);
  }
  proto.log_weight = -std::log(static_cast<double>(params.num_particles));

  ParticleSet set;
  set.particles.assign(static_cast<std::size_t>(params.num_particles), proto);
  set.time_step = 0;
  return set;
}

/// Applies a sampled association to one particle's Kalman beliefs.
inline void apply_association(Particle& particle, const Association& assoc,
                              const std::vector<Measurement>& measurements,
                              const FilterParams& params) {
  if (assoc.size() != particle.targets.size())
    throw ConfigError("association size does not match target count");
  const Eigen::Matrix2d q_s = params.spatial_process_cov();
  const Eigen::Matrix2d r_s = params.spatial_meas_cov();

  for (std::size_t j = 0; j < assoc.size(); ++j) {
    const TargetAssociation& a = assoc[j];
    TargetEstimate& t = particle.targets[j];
    t.location = a.location;

    if (a.assigned()) {
      const Measurement& y = measurements[static_cast<std::size_t>(a.measurement)];
      if (a.jumped) {
        // The jump prior is uniform over the location, so the associated
        // measurement alone determines the new spatial belief.
        t.spatial_mean = y.position;
        t.spatial_cov = r_s;
      } else {
        Gaussian g{t.spatial_mean, t.spatial_cov + q_s};
        g = update(g, y.position, r_s);
        t.spatial_mean = g.mean;
        t.spatial_cov = g.cov;
      }
      Gaussian f{t.feature_mean, t.feature_cov};
      f = update(f, y.feature, params.feature_meas_cov);
      t.feature_mean = f.mean;
      t.feature_cov = f.cov;
    } else if (a.jumped) {
      t.reset_spatial_noninformative();
    } else {
      t.spatial_cov += q_s;
    }
  }
}

/// Systematic resampling; weights are uniform afterwards.
inline void resample(ParticleSet& set, Rng& rng) {
  const std::size_t n = set.particles.size();
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i)
    weights[i] = std::exp(set.particles[i].log_weight);

  std::vector<Particle> next;
  next.reserve(n);
  const double step = 1.0 / static_cast<double>(n);
  double u = rng.uniform() * step;
  double cum = weights[0];
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (u > cum && i + 1 < n) cum += weights[++i];
    next.push_back(set.particles[i]);
    u += step;
  }
  const double lw = -std::log(static_cast<double>(n));
  for (Particle& p : next) p.log_weight = lw;
  set.particles = std::move(next);
  ++set.resample_count;
}

inline double effective_sample_size(const ParticleSet& set) {
  double sum_sq = 0.0;
  for (const Particle& p : set.particles) {
    const double w = std::exp(p.log_weight);
    sum_sq += w * w;
  }
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

/// One sequential importance sampling update: per particle, sample an
/// association per the configured mode, update the Kalman beliefs and
/// multiply the weight by the estimated normalization constant; then
/// normalize and resample if the effective sample size degenerates.
///
/// Each particle draws from its own random stream derived from
/// (seed, particle index, time step), so results do not depend on the number
/// of worker threads.
inline void step(ParticleSet& set, const Round& round, const FilterParams& params,
                 const Environment& env, int n_threads = 1) {
  if (set.particles.empty()) throw ConfigError("empty particle set");
  for (const Measurement& m : round.measurements)
    if (m.location != round.observed)
      throw ConfigError("measurement location differs from observed location");

  const int n = static_cast<int>(set.particles.size());
  detail::parallel_for(n, n_threads, [&](int i) {
    Particle& particle = set.particles[static_cast<std::size_t>(i)];
    Rng rng(mix_seed({params.rng_seed, kSaltParticle,
                      static_cast<std::uint64_t>(i),
                      static_cast<std::uint64_t>(round.time_step)}));
    const ProposalSet props = build_proposals(particle.targets, round, params, env);

    Association assoc;
    double log_z = 0.0;
    switch (params.sampler_mode) {
      case SamplerMode::kRejection: {
        assoc = rejection_sample(props, rng);
        log_z = estimate_log_z_independent(props);
        break;
      }
      case SamplerMode::kGibbsProposal: {
        GibbsChain chain = gibbs_chain_burned_in(props, rng, params.gibbs_burn_in);
        assoc = chain.association();
        log_z = estimate_log_z_independent(props);
        break;
      }
      case SamplerMode::kGibbsProposalAndWeights: {
        GibbsChain chain = gibbs_chain_burned_in(props, rng, params.gibbs_burn_in);
        assoc = chain.association();
        log_z = estimate_log_z_gibbs(chain, props, rng, params.gibbs_z_samples);
        break;
      }
    }

    apply_association(particle, assoc, round.measurements, params);
    particle.log_weight += log_z;
  });

  // Normalize in log space.
  std::vector<double> lw(set.particles.size());
  for (std::size_t i = 0; i < set.particles.size(); ++i)
    lw[i] = set.particles[i].log_weight;
  const double lse = logsumexp(lw);
  if (!std::isfinite(lse))
    throw NumericError("particle weights collapsed to zero");
  for (Particle& p : set.particles) p.log_weight -= lse;

  set.time_step = round.time_step;

  const double ess = effective_sample_size(set);
  if (ess < params.resample_ess_fraction * static_cast<double>(n)) {
    Rng rng(mix_seed({params.rng_seed, kSaltResample,
                      static_cast<std::uint64_t>(round.time_step)}));
    resample(set, rng);
  }
}

/// Posterior summary for target j: the weighted mixture of per-particle
/// spatial Gaussians, the location marginal, and a point estimate taken as
/// the weighted mean over the particles at the MAP location. MAP ties pick
/// the lower location id; the unknown location loses all ties. A target
/// whose MAP location is unknown yields no point estimate.
inline PosteriorSummary posterior(const ParticleSet& set, int j) {
  if (set.particles.empty()) throw ConfigError("empty particle set");
  if (j < 0 || j >= set.num_targets()) throw ConfigError("invalid target index");

  PosteriorSummary summary;
  summary.components.reserve(set.particles.size());
  for (const Particle& p : set.particles) {
    const TargetEstimate& t = p.targets[static_cast<std::size_t>(j)];
    const double w = std::exp(p.log_weight);
    summary.components.push_back({w, t.spatial_mean, t.spatial_cov});
    summary.location_marginal[t.location] += w;
  }

  double best = -1.0;
  LocationId best_loc = kUnknownLocation;
  for (const auto& [loc, prob] : summary.location_marginal) {
    const bool wins =
        prob > best ||
        (prob == best && !is_unknown(loc) &&
         (is_unknown(best_loc) || loc < best_loc));
    if (wins) {
      best = prob;
      best_loc = loc;
    }
  }
  summary.map_location = best_loc;

  if (!is_unknown(best_loc)) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    double mass = 0.0;
    for (const Particle& p : set.particles) {
      const TargetEstimate& t = p.targets[static_cast<std::size_t>(j)];
      if (t.location != best_loc) continue;
      const double w = std::exp(p.log_weight);
      mean += w * t.spatial_mean;
      mass += w;
    }
    if (mass > 0.0) summary.point_estimate = mean / mass;
  }
  return summary;
}

}  // namespace jumptrack
