#pragma once

#include <cmath>
#include <vector>

#include "jumptrack/gaussian.hpp"
#include "jumptrack/prior.hpp"
#include "jumptrack/types.hpp"

namespace jumptrack {

/// Kalman marginal likelihood of a measurement under the local-movement
/// hypothesis: spatial and feature predictive densities multiplied.
/// A location mismatch yields zero density (-inf in log space).
inline double log_point_likelihood_no_jump(const TargetEstimate& t,
                                           const Measurement& y,
                                           const FilterParams& params) {
  if (t.location != y.location)
    return -std::numeric_limits<double>::infinity();
  const double spatial = log_gaussian_density(
      y.position, t.spatial_mean,
      t.spatial_cov + params.spatial_process_cov() + params.spatial_meas_cov());
  // Features carry no process noise.
  const double feature = log_gaussian_density(y.feature, t.feature_mean,
                                              t.feature_cov + params.feature_meas_cov);
  return spatial + feature;
}

/// Likelihood of a measurement under the jump hypothesis: uniform over the
/// area of the measurement's location times the feature marginal. The
/// spatial belief is ignored.
inline double log_point_likelihood_jump(const TargetEstimate& t,
                                        const Measurement& y,
                                        const FilterParams& params,
                                        const Environment& env) {
  const double feature = log_gaussian_density(y.feature, t.feature_mean,
                                              t.feature_cov + params.feature_meas_cov);
  return feature - std::log(env.area(y.location));
}

/// Clutter density: uniform over the spatial and feature domains of the
/// location the measurement was observed in.
inline double log_clutter_density(LocationId location, const FilterParams& params,
                                  const Environment& env) {
  return -std::log(env.area(location) * params.feature_support);
}

inline double log_clutter_likelihood(const Measurement& y,
                                     const FilterParams& params,
                                     const Environment& env) {
  return log_clutter_density(y.location, params, env);
}

/// Likelihood stand-in for "target j produced no measurement", used by the
/// independence-factored proposal: the expected value of the target's own
/// predictive density, E[N(Y; mu, S)] with Y ~ N(mu, S), divided by the
/// number of targets. S is block-diagonal over the spatial part (with
/// process and measurement noise) and the feature part.
///
/// A flattened (position-unknown) spatial belief stands for a uniform
/// density rather than a Gaussian, so its expected self-density is 1/area;
/// plugging the inflated covariance into the Gaussian form would drive the
/// value to zero and starve every eps row of the proposal.
inline double log_epsilon_pseudo_likelihood(const TargetEstimate& t,
                                            int n_targets,
                                            const FilterParams& params,
                                            double spatial_area_m2 = 20.0) {
  if (n_targets < 1) throw ConfigError("n_targets must be positive");
  const double feature =
      log_expected_self_density(t.feature_cov + params.feature_meas_cov);
  double spatial;
  if (t.spatial_informative()) {
    spatial = log_expected_self_density(
        t.spatial_cov + params.spatial_process_cov() + params.spatial_meas_cov());
  } else {
    spatial = -std::log(spatial_area_m2);
  }
  return spatial + feature - std::log(n_targets);
}

inline double epsilon_pseudo_likelihood(const TargetEstimate& t, int n_targets,
                                        const FilterParams& params,
                                        double spatial_area_m2 = 20.0) {
  return std::exp(
      log_epsilon_pseudo_likelihood(t, n_targets, params, spatial_area_m2));
}

/// Joint log likelihood of a measurement set given a full association:
/// assigned measurements contribute their point likelihood (jump or no-jump
/// branch), every unassigned measurement contributes the clutter density.
inline double joint_log_likelihood(const std::vector<Measurement>& measurements,
                                   const Association& assoc,
                                   const std::vector<TargetEstimate>& targets,
                                   const FilterParams& params,
                                   const Environment& env) {
  const int m_count = static_cast<int>(measurements.size());
  if (assoc.size() != targets.size())
    throw ConfigError("association size does not match target count");
  if (!validate_association(assoc, m_count))
    throw ConfigError("invalid association in joint_log_likelihood");

  double log_l = 0.0;
  std::vector<bool> assigned(measurements.size(), false);
  for (std::size_t j = 0; j < assoc.size(); ++j) {
    const TargetAssociation& a = assoc[j];
    if (!a.assigned()) continue;
    assigned[static_cast<std::size_t>(a.measurement)] = true;
    const Measurement& y = measurements[static_cast<std::size_t>(a.measurement)];
    log_l += a.jumped ? log_point_likelihood_jump(targets[j], y, params, env)
                      : log_point_likelihood_no_jump(targets[j], y, params);
  }
  for (std::size_t m = 0; m < measurements.size(); ++m)
    if (!assigned[m]) log_l += log_clutter_likelihood(measurements[m], params, env);
  return log_l;
}

}  // namespace jumptrack
