#pragma once

#include <cmath>
#include <vector>

#include "jumptrack/types.hpp"

namespace jumptrack {

/// The six cells of one transition-prior row
/// p(u, l, c | previous location), for a fixed previous location and a fixed
/// observed location. Cells ending in _meas are per-measurement
/// probabilities: their total mass is the cell value times the measurement
/// count.
struct PriorCells {
  double no_jump_meas = 0.0;      // u = no jump, l = previous, c = m
  double no_jump_eps = 0.0;       // u = no jump, l = previous, c = eps
  double jump_obs_meas = 0.0;     // u = jump, l = observed, c = m
  double jump_obs_eps = 0.0;      // u = jump, l = observed, c = eps
  double jump_unknown_meas = 0.0; // u = jump, l = unknown, c = m (always 0)
  double jump_unknown_eps = 0.0;  // u = jump, l = unknown, c = eps

  double total_mass(int m_count) const {
    return m_count * (no_jump_meas + jump_obs_meas + jump_unknown_meas) +
           no_jump_eps + jump_obs_eps + jump_unknown_eps;
  }
};

/// Discrete prior over (jump action, new location, association class) given
/// the target's previous location and the currently observed location.
///
/// When m_count is zero the detection mass has nowhere to go; it is folded
/// into the matching eps cell so each row remains a proper distribution.
inline PriorCells transition_prior(LocationId prev_loc, LocationId obs_loc,
                                   int m_count, const Environment& env,
                                   const FilterParams& params) {
  if (m_count < 0) throw ConfigError("m_count must be non-negative");
  if (!env.valid(obs_loc))
    throw ConfigError("observed location invalid in transition_prior");
  if (!is_unknown(prev_loc) && !env.valid(prev_loc))
    throw ConfigError("previous location invalid in transition_prior");

  const double n_l = static_cast<double>(env.count());
  const double pj = params.p_jump;
  const double pm = params.p_meas;
  const double per_meas = m_count > 0 ? 1.0 / m_count : 0.0;

  PriorCells cells;
  if (is_unknown(prev_loc)) {
    // Jumping is certain once the location is unknown.
    cells.jump_obs_meas = per_meas / n_l * pm;
    cells.jump_obs_eps = (1.0 - pm) / n_l;
    cells.jump_unknown_eps = (n_l - 1.0) / n_l;
    if (m_count == 0) cells.jump_obs_eps = 1.0 / n_l;
  } else if (prev_loc == obs_loc) {
    cells.no_jump_meas = per_meas * (1.0 - pj) * pm;
    cells.no_jump_eps = (1.0 - pj) * (1.0 - pm);
    cells.jump_obs_meas = per_meas / n_l * pj * pm;
    cells.jump_obs_eps = pj * (1.0 - pm) / n_l;
    cells.jump_unknown_eps = pj * (n_l - 1.0) / n_l;
    if (m_count == 0) {
      cells.no_jump_eps = 1.0 - pj;
      cells.jump_obs_eps = pj / n_l;
    }
  } else {
    cells.no_jump_eps = 1.0 - pj;
    cells.jump_obs_meas = per_meas / n_l * pj * pm;
    cells.jump_obs_eps = pj * (1.0 - pm) / n_l;
    cells.jump_unknown_eps = pj * (n_l - 1.0) / n_l;
    if (m_count == 0) cells.jump_obs_eps = pj / n_l;
  }
  return cells;
}

/// Checks the hard constraints on a joint association: mutual exclusion over
/// measurement indices and consistency of each entry's location with its
/// action and assignment.
inline bool validate_association(const Association& assoc, int m_count,
                                 const std::vector<LocationId>& prev_locations,
                                 LocationId observed) {
  if (assoc.size() != prev_locations.size()) return false;
  std::vector<bool> claimed(static_cast<std::size_t>(m_count), false);
  for (std::size_t j = 0; j < assoc.size(); ++j) {
    const TargetAssociation& a = assoc[j];
    if (a.assigned()) {
      if (a.measurement < 0 || a.measurement >= m_count) return false;
      if (claimed[static_cast<std::size_t>(a.measurement)]) return false;
      claimed[static_cast<std::size_t>(a.measurement)] = true;
      // A measurement pins the target to the observed location.
      if (a.location != observed) return false;
    }
    if (!a.jumped) {
      if (is_unknown(prev_locations[j])) return false;  // must jump from unknown
      if (a.location != prev_locations[j]) return false;
      if (a.assigned() && prev_locations[j] != observed) return false;
    } else {
      if (a.location != observed && !is_unknown(a.location)) return false;
      if (is_unknown(a.location) && a.assigned()) return false;
    }
  }
  return true;
}

/// Mutual-exclusion-only variant for callers that have no location context.
inline bool validate_association(const Association& assoc, int m_count) {
  std::vector<bool> claimed(static_cast<std::size_t>(m_count), false);
  for (const TargetAssociation& a : assoc) {
    if (!a.assigned()) continue;
    if (a.measurement < 0 || a.measurement >= m_count) return false;
    if (claimed[static_cast<std::size_t>(a.measurement)]) return false;
    claimed[static_cast<std::size_t>(a.measurement)] = true;
  }
  return true;
}

}  // namespace jumptrack
