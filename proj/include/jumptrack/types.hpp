#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jumptrack/errors.hpp"

namespace jumptrack {

/// Index into the environment's location list. kUnknownLocation is the
/// sentinel for "jumped somewhere unobserved".
using LocationId = std::int32_t;
inline constexpr LocationId kUnknownLocation = -1;

inline bool is_unknown(LocationId l) { return l == kUnknownLocation; }

/// The discrete locations (rooms) and their floor areas in m^2.
struct Environment {
  std::vector<double> areas;

  int count() const { return static_cast<int>(areas.size()); }

  bool valid(LocationId l) const {
    return l >= 0 && l < static_cast<LocationId>(areas.size());
  }

  double area(LocationId l) const {
    if (!valid(l)) throw ConfigError("invalid location id " + std::to_string(l));
    return areas[static_cast<std::size_t>(l)];
  }

  void validate() const {
    if (areas.empty()) throw ConfigError("environment needs at least one location");
    for (double a : areas)
      if (!(a > 0.0)) throw ConfigError("location areas must be positive");
  }

  static Environment uniform(int n_locations, double area_m2 = 20.0) {
    Environment env;
    env.areas.assign(static_cast<std::size_t>(n_locations), area_m2);
    env.validate();
    return env;
  }
};

enum class SamplerMode { kRejection, kGibbsProposal, kGibbsProposalAndWeights };

inline std::string to_string(SamplerMode m) {
  switch (m) {
    case SamplerMode::kRejection: return "rejection";
    case SamplerMode::kGibbsProposal: return "gibbs-proposal";
    case SamplerMode::kGibbsProposalAndWeights: return "gibbs-proposal-and-weights";
  }
  return "rejection";
}

inline SamplerMode sampler_mode_from_string(const std::string& s) {
  if (s == "rejection") return SamplerMode::kRejection;
  if (s == "gibbs-proposal") return SamplerMode::kGibbsProposal;
  if (s == "gibbs-proposal-and-weights") return SamplerMode::kGibbsProposalAndWeights;
  throw ConfigError("unknown sampler_mode '" + s + "'");
}

struct FilterParams {
  double p_jump = 0.03;
  double p_meas = 0.98;
  double sigma_q = 0.35;   // spatial process noise std (m)
  double sigma_r = 0.15;   // spatial measurement noise std (m)
  Eigen::MatrixXd feature_meas_cov;  // R^f, D x D
  double feature_support = 5.0;      // S^f, clutter feature-domain volume
  int num_particles = 300;
  SamplerMode sampler_mode = SamplerMode::kRejection;
  int gibbs_burn_in = 100;
  int gibbs_z_samples = 100;
  double resample_ess_fraction = 0.5;
  std::uint64_t rng_seed = 1;

  Eigen::Matrix2d spatial_process_cov() const {
    return sigma_q * sigma_q * Eigen::Matrix2d::Identity();
  }
  Eigen::Matrix2d spatial_meas_cov() const {
    return sigma_r * sigma_r * Eigen::Matrix2d::Identity();
  }

  void validate() const {
    auto open01 = [](double p, const char* name) {
      if (!(p > 0.0 && p < 1.0))
        throw ConfigError(std::string(name) + " must lie in (0, 1)");
    };
    open01(p_jump, "p_jump");
    open01(p_meas, "p_meas");
    if (!(sigma_q > 0.0)) throw ConfigError("sigma_q must be positive");
    if (!(sigma_r > 0.0)) throw ConfigError("sigma_r must be positive");
    if (!(feature_support > 0.0)) throw ConfigError("feature_support must be positive");
    if (num_particles < 1) throw ConfigError("num_particles must be positive");
    if (gibbs_burn_in < 1) throw ConfigError("gibbs_burn_in must be positive");
    if (gibbs_z_samples < 1) throw ConfigError("gibbs_z_samples must be positive");
    if (!(resample_ess_fraction > 0.0 && resample_ess_fraction <= 1.0))
      throw ConfigError("resample_ess_fraction must lie in (0, 1]");
    if (feature_meas_cov.rows() != feature_meas_cov.cols() ||
        feature_meas_cov.rows() < 1)
      throw ConfigError("feature_meas_cov must be a square D x D matrix");
    if (!feature_meas_cov.isApprox(feature_meas_cov.transpose(), 1e-10))
      throw ConfigError("feature_meas_cov must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(feature_meas_cov);
    if (llt.info() != Eigen::Success)
      throw ConfigError("feature_meas_cov must be positive-definite");
  }
};

/// One detection: 2-D position, feature vector and the location/time it was
/// observed in. The label is ground truth carried along for evaluation only.
struct Measurement {
  Eigen::Vector2d position;
  Eigen::VectorXd feature;
  LocationId location = 0;
  int time_step = 0;
  std::optional<int> label;
};

/// One observation round: everything the robot saw at one time step.
struct Round {
  int time_step = 0;
  LocationId observed = 0;
  std::vector<Measurement> measurements;
};

// Variance used for the flattened spatial belief of targets whose position
// is unknown (jumped without an associated measurement).
inline constexpr double kNonInformativeVar = 1e6;

/// Per-target Gaussian belief over position and feature plus the discrete
/// location estimate.
struct TargetEstimate {
  Eigen::Vector2d spatial_mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d spatial_cov = Eigen::Matrix2d::Identity();
  Eigen::VectorXd feature_mean;
  Eigen::MatrixXd feature_cov;
  LocationId location = 0;

  bool spatial_informative() const {
    return spatial_cov(0, 0) < 0.5 * kNonInformativeVar;
  }

  void reset_spatial_noninformative() {
    spatial_cov = kNonInformativeVar * Eigen::Matrix2d::Identity();
  }
};

inline constexpr int kNoMeasurement = -1;  // the epsilon assignment

/// Joint assignment for one target at one time step: measurement index (or
/// epsilon), whether the target jumped, and the resulting location.
struct TargetAssociation {
  int measurement = kNoMeasurement;
  bool jumped = false;
  LocationId location = 0;

  bool assigned() const { return measurement != kNoMeasurement; }

  bool operator==(const TargetAssociation& o) const {
    return measurement == o.measurement && jumped == o.jumped &&
           location == o.location;
  }
};

using Association = std::vector<TargetAssociation>;

/// Target as given at initialization time (and as stored in dataset files).
struct InitialTarget {
  int label = 0;
  LocationId location = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::VectorXd feature;
};

/// In-memory form of a dataset file.
struct Dataset {
  Environment env;
  int feature_dim = 0;
  std::vector<InitialTarget> initial_targets;
  std::vector<Round> rounds;

  void validate() const {
    env.validate();
    if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
    for (const auto& t : initial_targets) {
      if (!env.valid(t.location))
        throw ConfigError("initial target in invalid location");
      if (t.feature.size() != feature_dim)
        throw ConfigError("initial target feature dimension mismatch");
    }
    int prev_step = std::numeric_limits<int>::min();
    for (const auto& r : rounds) {
      if (r.time_step <= prev_step)
        throw ConfigError("rounds must be strictly increasing in time_step");
      prev_step = r.time_step;
      if (!env.valid(r.observed))
        throw ConfigError("round observes invalid location");
      for (const auto& m : r.measurements) {
        if (m.location != r.observed)
          throw ConfigError("measurement location differs from observed location");
        if (m.feature.size() != feature_dim)
          throw ConfigError("measurement feature dimension mismatch");
      }
    }
  }
};

}  // namespace jumptrack
