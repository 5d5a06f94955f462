#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>

#include "jumptrack/sampler.hpp"
#include "oracle_support.hpp"
#include "test_support.hpp"

using namespace jumptrack;
using namespace jumptrack::testing;

namespace {

/// The shared two-target / two-measurement instance with moderately
/// ambiguous evidence. Likelihood ratios stay within a few orders of
/// magnitude so the harmonic-mean weight estimator is well behaved.
oracle::Instance ambiguous_instance() {
  oracle::Instance inst;
  inst.targets = {{1.0, 1.0, 0.05, 0.0, 0.1, 0},
                  {2.4, 1.3, 0.08, 1.0, 0.1, 0}};
  inst.meas = {{1.2, 1.05, 0.15}, {2.2, 1.45, 0.8}};
  inst.observed = 0;
  inst.n_loc = 2;
  return inst;
}

/// Converts an oracle instance into library inputs.
struct LibInstance {
  std::vector<TargetEstimate> targets;
  Round round;
  FilterParams params;
  Environment env;
};

LibInstance to_lib(const oracle::Instance& inst) {
  LibInstance lib;
  lib.params = default_params(1, inst.fmeas_var);
  lib.params.p_jump = inst.p_jump;
  lib.params.p_meas = inst.p_meas;
  lib.params.sigma_q = inst.sigma_q;
  lib.params.sigma_r = inst.sigma_r;
  lib.params.feature_support = inst.support;
  lib.env = Environment::uniform(inst.n_loc, inst.area);
  for (const oracle::Target& t : inst.targets) {
    TargetEstimate est = make_target(t.x, t.y, feat1(t.f),
                                     t.loc == oracle::kUnknown ? kUnknownLocation : t.loc,
                                     t.svar, t.fvar);
    lib.targets.push_back(est);
  }
  lib.round.time_step = 1;
  lib.round.observed = inst.observed;
  for (const oracle::Meas& m : inst.meas)
    lib.round.measurements.push_back(make_measurement(m.x, m.y, feat1(m.f), inst.observed));
  return lib;
}

std::string key_of_association(const Association& assoc) {
  std::string key;
  for (const TargetAssociation& a : assoc) {
    key += std::to_string(a.assigned() ? a.measurement : oracle::kEps) +
           (a.jumped ? "j" : "s") +
           std::to_string(is_unknown(a.location) ? oracle::kUnknown : a.location) + "|";
  }
  return key;
}

}  // namespace

TEST_CASE("individual proposals enumerate the prior cells") {
  const oracle::Instance inst = ambiguous_instance();
  LibInstance lib = to_lib(inst);

  SECTION("no measurements leaves only eps rows") {
    Round empty;
    empty.time_step = 1;
    empty.observed = 0;
    const IndividualProposal prop =
        build_individual_proposal(lib.targets[0], empty, 2, lib.params, lib.env);
    REQUIRE(prop.rows.size() == 3);
    for (const ProposalRow& r : prop.rows) CHECK_FALSE(r.assoc.assigned());
    // With nothing to explain the weights are exactly the prior masses.
    CHECK(std::exp(prop.log_sum_weights()) == Catch::Approx(1.0));
  }

  SECTION("a target far from everything keeps its eps mass") {
    LibInstance far = to_lib(inst);
    far.targets[0].feature_mean = feat1(20.0 * std::sqrt(0.35));  // ~20 sigma away
    const IndividualProposal prop =
        build_individual_proposal(far.targets[0], far.round, 2, far.params, far.env);
    double eps_mass = 0.0, total = 0.0;
    for (std::size_t r = 0; r < prop.rows.size(); ++r) {
      const double w = std::exp(prop.log_w[r]);
      total += w;
      if (!prop.rows[r].assoc.assigned()) eps_mass += w;
    }
    CHECK(eps_mass / total > 0.99);
  }

  SECTION("a target on a measurement prefers staying over jumping") {
    LibInstance on = to_lib(inst);
    on.targets[0].spatial_mean = Eigen::Vector2d(1.2, 1.05);
    on.targets[0].spatial_cov = 0.01 * Eigen::Matrix2d::Identity();
    on.targets[0].feature_mean = feat1(0.15);
    const IndividualProposal prop =
        build_individual_proposal(on.targets[0], on.round, 2, on.params, on.env);
    double stay = kNegInf, jump = kNegInf;
    for (std::size_t r = 0; r < prop.rows.size(); ++r) {
      if (prop.rows[r].assoc.measurement != 0) continue;
      if (prop.rows[r].assoc.jumped) jump = prop.log_w[r];
      else stay = prop.log_w[r];
    }
    const double bound = (1.0 - on.params.p_jump) * on.params.p_meas * 20.0 /
                         (on.params.p_jump * on.params.p_meas / 2.0);
    CHECK(std::exp(stay - jump) >= bound);
  }
}

TEST_CASE("rejection sampling draws from the constrained product") {
  const oracle::Instance inst = ambiguous_instance();
  LibInstance lib = to_lib(inst);
  const ProposalSet props = build_proposals(lib.targets, lib.round, lib.params, lib.env);

  SECTION("single target draws are always accepted") {
    oracle::Instance single = inst;
    single.targets.resize(1);
    LibInstance lib1 = to_lib(single);
    const ProposalSet p1 = build_proposals(lib1.targets, lib1.round, lib1.params, lib1.env);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const Association a = rejection_sample(p1, rng);
      REQUIRE(validate_association(a, 2, {lib1.targets[0].location}, 0));
    }
  }

  SECTION("forced conflicts fall back to a conflict-avoiding draw") {
    // Two targets locked onto the same single measurement.
    oracle::Instance locked;
    locked.targets = {{1.0, 1.0, 1e-4, 0.0, 1e-4, 0}, {1.0, 1.0, 1e-4, 0.0, 1e-4, 0}};
    locked.meas = {{1.0, 1.0, 0.0}};
    locked.observed = 0;
    LibInstance lock_lib = to_lib(locked);
    const ProposalSet lp =
        build_proposals(lock_lib.targets, lock_lib.round, lock_lib.params, lock_lib.env);
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
      const Association a = rejection_sample(lp, rng, 50);
      REQUIRE(validate_association(a, 1));
      const int assigned = (a[0].assigned() ? 1 : 0) + (a[1].assigned() ? 1 : 0);
      REQUIRE(assigned == 1);
    }
  }

  SECTION("empirical distribution matches the renormalized product") {
    const auto expected = oracle::constrained_product_distribution(inst);
    std::map<std::string, double> empirical;
    Rng rng(101);
    const int n = 100000;
    for (int i = 0; i < n; ++i)
      empirical[key_of_association(rejection_sample(props, rng))] += 1.0 / n;
    CHECK(oracle::tv_distance(empirical, expected) < 0.02);
  }
}

TEST_CASE("gibbs sampling targets the exact importance distribution") {
  const oracle::Instance inst = ambiguous_instance();
  LibInstance lib = to_lib(inst);
  const ProposalSet props = build_proposals(lib.targets, lib.round, lib.params, lib.env);

  SECTION("N = 1 chains leave the single-target conditional invariant") {
    oracle::Instance single = inst;
    single.targets.resize(1);
    LibInstance lib1 = to_lib(single);
    const ProposalSet p1 = build_proposals(lib1.targets, lib1.round, lib1.params, lib1.env);

    // Exact conditional: prior x point / clutter on m rows, prior on eps.
    const auto rows = oracle::enumerate_rows(single, 0);
    std::map<std::string, double> expected;
    double total = 0.0;
    for (const oracle::Row& r : rows) {
      const double w =
          r.m == oracle::kEps ? r.prior : r.prior * r.point / single.clutter();
      expected[std::to_string(r.m) + (r.jumped ? "j" : "s") + std::to_string(r.loc) + "|"] += w;
      total += w;
    }
    for (auto& [_, v] : expected) v /= total;

    Rng rng(17);
    GibbsChain chain = gibbs_chain_burned_in(p1, rng, 50);
    std::map<std::string, double> empirical;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      chain.blocked_update(rng);
      empirical[key_of_association(chain.association())] += 1.0 / n;
    }
    CHECK(oracle::tv_distance(empirical, expected) < 0.01);
  }

  SECTION("N = 2 chain matches exhaustive enumeration") {
    const auto expected = oracle::exact_distribution(inst);
    Rng rng(23);
    GibbsChain chain = gibbs_chain_burned_in(props, rng, 100);
    std::map<std::string, double> empirical;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      chain.blocked_update(rng);
      empirical[key_of_association(chain.association())] += 1.0 / n;
    }
    CHECK(oracle::tv_distance(empirical, expected) < 0.02);
  }

  SECTION("the chain forgets its starting point") {
    std::map<std::string, double> a, b;
    const int n = 30000;
    {
      Rng rng(31);
      GibbsChain chain = gibbs_chain_burned_in(props, rng, 100);
      for (int i = 0; i < n; ++i) {
        chain.blocked_update(rng);
        a[key_of_association(chain.association())] += 1.0 / n;
      }
    }
    {
      // Start from the all-eps state instead of a rejection draw.
      std::vector<int> eps_rows;
      for (const IndividualProposal& prop : props.targets) {
        for (int r = 0; r < prop.size(); ++r) {
          if (!prop.rows[static_cast<std::size_t>(r)].assoc.assigned() &&
              !prop.rows[static_cast<std::size_t>(r)].assoc.jumped) {
            eps_rows.push_back(r);
            break;
          }
        }
      }
      Rng rng(37);
      GibbsChain chain(props, eps_rows);
      for (int i = 0; i < 100; ++i) chain.blocked_update(rng);
      for (int i = 0; i < n; ++i) {
        chain.blocked_update(rng);
        b[key_of_association(chain.association())] += 1.0 / n;
      }
    }
    CHECK(oracle::tv_distance(a, b) < 0.05);
  }

  SECTION("pair-conditional frequencies match the enumerated conditional") {
    Rng rng(41);
    GibbsChain chain = gibbs_chain_burned_in(props, rng, 10);
    const PairConditional cond = chain.pair_conditional(0, 1);
    double total = 0.0;
    for (double w : cond.weights) total += w;

    std::map<std::string, double> expected;
    for (std::size_t i = 0; i < cond.combos.size(); ++i) {
      const auto [ra, rb] = cond.combos[i];
      const std::string key = std::to_string(ra) + ":" + std::to_string(rb);
      expected[key] += cond.weights[i] / total;
    }
    std::map<std::string, double> empirical;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      chain.update_pair(0, 1, rng);
      const std::string key = std::to_string(chain.rows()[0]) + ":" +
                              std::to_string(chain.rows()[1]);
      empirical[key] += 1.0 / n;
    }
    CHECK(oracle::tv_distance(empirical, expected) < 0.01);
  }
}

TEST_CASE("samplers always return valid associations") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 10; ++trial) {
    oracle::Instance inst;
    inst.n_loc = 3;
    std::uniform_real_distribution<double> pos(0.0, 4.0), feat(-1.0, 3.0);
    for (int j = 0; j < 3; ++j)
      inst.targets.push_back(
          {pos(gen), pos(gen), 0.1, feat(gen), 0.1, static_cast<int>(gen() % 3)});
    inst.targets[1].loc = oracle::kUnknown;
    for (int m = 0; m < 3; ++m) inst.meas.push_back({pos(gen), pos(gen), feat(gen)});
    LibInstance lib = to_lib(inst);
    const ProposalSet props = build_proposals(lib.targets, lib.round, lib.params, lib.env);

    std::vector<LocationId> prev;
    for (const TargetEstimate& t : lib.targets) prev.push_back(t.location);

    Rng rng(1000 + trial);
    for (int i = 0; i < 50; ++i) {
      REQUIRE(validate_association(rejection_sample(props, rng), 3, prev, 0));
      GibbsChain chain = gibbs_chain_burned_in(props, rng, 20);
      REQUIRE(validate_association(chain.association(), 3, prev, 0));
    }
  }
}

TEST_CASE("normalization constant estimators") {
  const oracle::Instance inst = ambiguous_instance();
  LibInstance lib = to_lib(inst);
  const ProposalSet props = build_proposals(lib.targets, lib.round, lib.params, lib.env);

  SECTION("gibbs harmonic mean hits the exact sum on the enumerable case") {
    // Broad overlapping beliefs keep 1/L well conditioned; the estimator is
    // heavy-tailed whenever high-prior assignments carry tiny likelihoods.
    oracle::Instance broad;
    broad.targets = {{1.5, 1.5, 0.4, 0.2, 0.3, 0}, {2.5, 2.0, 0.4, 0.8, 0.3, 0}};
    broad.meas = {{1.8, 1.6, 0.4}, {2.2, 1.9, 0.6}};
    broad.observed = 0;
    broad.n_loc = 2;
    LibInstance broad_lib = to_lib(broad);
    const ProposalSet bp = build_proposals(broad_lib.targets, broad_lib.round,
                                           broad_lib.params, broad_lib.env);
    const double exact = oracle::exact_z(broad);
    for (int seed : {53, 54, 55}) {
      Rng rng(static_cast<std::uint64_t>(seed));
      GibbsChain chain = gibbs_chain_burned_in(bp, rng, 100);
      const double est = std::exp(estimate_log_z_gibbs(chain, bp, rng, 10000));
      CHECK(est == Catch::Approx(exact).epsilon(0.05));
    }
  }

  SECTION("empty rounds have Z = 1 under both estimators") {
    Round empty;
    empty.time_step = 1;
    empty.observed = 0;
    const ProposalSet p0 = build_proposals(lib.targets, empty, lib.params, lib.env);
    CHECK(estimate_log_z_independent(p0) == Catch::Approx(0.0).margin(1e-12));
    Rng rng(59);
    GibbsChain chain = gibbs_chain_burned_in(p0, rng, 20);
    CHECK(estimate_log_z_gibbs(chain, p0, rng, 100) == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("N = 1 independent product is the plain proposal sum") {
    oracle::Instance single = inst;
    single.targets.resize(1);
    LibInstance lib1 = to_lib(single);
    const ProposalSet p1 = build_proposals(lib1.targets, lib1.round, lib1.params, lib1.env);
    double manual = 0.0;
    for (const oracle::Row& r : oracle::enumerate_rows(single, 0))
      manual += r.prior * (r.m == oracle::kEps ? oracle::eps_pseudo(single, 0) : r.point);
    CHECK(std::exp(estimate_log_z_independent(p1)) == Catch::Approx(manual));
  }

  SECTION("competing targets make the independent product an overestimate") {
    oracle::Instance locked;
    locked.targets = {{1.0, 1.0, 1e-3, 0.0, 1e-3, 0}, {1.0, 1.0, 1e-3, 0.0, 1e-3, 0}};
    locked.meas = {{1.0, 1.0, 0.0}};
    locked.observed = 0;
    LibInstance lock_lib = to_lib(locked);
    const ProposalSet lp =
        build_proposals(lock_lib.targets, lock_lib.round, lock_lib.params, lock_lib.env);

    // Constrained sum of the same row weights, conflicts excluded.
    double constrained = 0.0;
    const auto rows0 = oracle::enumerate_rows(locked, 0);
    const auto rows1 = oracle::enumerate_rows(locked, 1);
    auto weight = [&](const oracle::Row& r, int j) {
      return r.prior * (r.m == oracle::kEps ? oracle::eps_pseudo(locked, j) : r.point);
    };
    for (const auto& r0 : rows0)
      for (const auto& r1 : rows1) {
        if (r0.m != oracle::kEps && r0.m == r1.m) continue;
        constrained += weight(r0, 0) * weight(r1, 1);
      }
    const double product = std::exp(estimate_log_z_independent(lp));
    CHECK(product > constrained);
    CHECK(product / constrained > 1.0);
  }

  SECTION("estimators agree when measurements vastly outnumber targets") {
    // M = 12 >= 3N with well-separated targets, each explained by its own
    // measurement. The mutual-exclusion constraint then barely binds, so the
    // per-target product matches the exact joint sum once put on the same
    // scale (the remaining M - N measurements stay clutter under both). A
    // loose process noise keeps every hypothesis reachable, which the
    // harmonic-mean estimate needs at finite sample counts.
    oracle::Instance big;
    big.sigma_q = 1.2;
    big.targets = {{1.0, 1.0, 0.05, 0.0, 0.05, 0}, {3.5, 3.5, 0.05, 1.6, 0.05, 0}};
    big.meas = {{1.05, 1.0, 0.1}, {3.45, 3.55, 1.5}};
    for (int i = 0; i < 10; ++i)
      big.meas.push_back({0.5 + 0.35 * i, 3.9 - 0.33 * i, 0.3 + i / 9.0});
    big.observed = 0;
    LibInstance big_lib = to_lib(big);
    const ProposalSet bp =
        build_proposals(big_lib.targets, big_lib.round, big_lib.params, big_lib.env);

    const double exact = oracle::exact_z(big);
    const double log_scale =
        (static_cast<int>(big.meas.size()) - static_cast<int>(big.targets.size())) *
        std::log(big.clutter());
    const double indep = std::exp(estimate_log_z_independent(bp) + log_scale);
    CHECK(indep == Catch::Approx(exact).epsilon(0.10));

    Rng rng(61);
    GibbsChain chain = gibbs_chain_burned_in(bp, rng, 100);
    const double gibbs = std::exp(estimate_log_z_gibbs(chain, bp, rng, 100000));
    CHECK(indep == Catch::Approx(gibbs).epsilon(0.10));
  }
}

TEST_CASE("rejection and gibbs agree on the eps marginal when M >> N") {
  // Built directly against the library with 3-D features, matching the
  // feature dimensionality the defaults are tuned for.
  LibInstance lib;
  lib.params = default_params(3);
  lib.env = Environment::uniform(2, 20.0);
  Eigen::VectorXd f0 = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd f1 = 2.0 * Eigen::VectorXd::Ones(3);
  lib.targets = {make_target(1.0, 1.0, f0, 0, 0.05, 0.05),
                 make_target(3.5, 3.5, f1, 0, 0.05, 0.05)};
  lib.round.time_step = 1;
  lib.round.observed = 0;
  lib.round.measurements = {
      make_measurement(1.0, 1.0, f0, 0),
      make_measurement(3.5, 3.5, f1, 0),
      make_measurement(2.0, 3.0, Eigen::VectorXd::Ones(3), 0),
      make_measurement(0.5, 3.0, 0.7 * Eigen::VectorXd::Ones(3), 0),
      make_measurement(3.0, 0.5, 1.3 * Eigen::VectorXd::Ones(3), 0),
      make_measurement(2.5, 2.0, 0.9 * Eigen::VectorXd::Ones(3), 0)};
  const ProposalSet props = build_proposals(lib.targets, lib.round, lib.params, lib.env);

  const int n = 20000;
  std::vector<double> rej_eps(2, 0.0), gibbs_eps(2, 0.0);
  {
    Rng rng(67);
    for (int i = 0; i < n; ++i) {
      const Association a = rejection_sample(props, rng);
      for (int j = 0; j < 2; ++j)
        if (!a[static_cast<std::size_t>(j)].assigned())
          rej_eps[static_cast<std::size_t>(j)] += 1.0 / n;
    }
  }
  {
    Rng rng(71);
    GibbsChain chain = gibbs_chain_burned_in(props, rng, 100);
    for (int i = 0; i < n; ++i) {
      chain.blocked_update(rng);
      const Association a = chain.association();
      for (int j = 0; j < 2; ++j)
        if (!a[static_cast<std::size_t>(j)].assigned())
          gibbs_eps[static_cast<std::size_t>(j)] += 1.0 / n;
    }
  }
  CHECK(std::abs(rej_eps[0] - gibbs_eps[0]) < 0.03);
  CHECK(std::abs(rej_eps[1] - gibbs_eps[1]) < 0.03);
}

TEST_CASE("sampling is deterministic in the seed") {
  const oracle::Instance inst = ambiguous_instance();
  LibInstance lib = to_lib(inst);
  const ProposalSet props = build_proposals(lib.targets, lib.round, lib.params, lib.env);

  std::vector<std::string> first, second;
  for (int pass = 0; pass < 2; ++pass) {
    auto& out = pass == 0 ? first : second;
    Rng rng(12345);
    for (int i = 0; i < 20; ++i)
      out.push_back(key_of_association(rejection_sample(props, rng)));
    GibbsChain chain = gibbs_chain_burned_in(props, rng, 30);
    for (int i = 0; i < 20; ++i) {
      chain.blocked_update(rng);
      out.push_back(key_of_association(chain.association()));
    }
  }
  CHECK(first == second);
}
