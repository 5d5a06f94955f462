#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

#include "jumptrack/errors.hpp"

namespace jumptrack {

/// splitmix64 finalizer, used to derive independent stream seeds from
/// (seed, particle index, time step, salt) tuples.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

// Salts keeping unrelated streams apart.
inline constexpr std::uint64_t kSaltParticle = 0x70617274ULL;
inline constexpr std::uint64_t kSaltResample = 0x72736d70ULL;
inline constexpr std::uint64_t kSaltDataset = 0x64617461ULL;
inline constexpr std::uint64_t kSaltEval = 0x6576616cULL;

/// Deterministic random stream. All draws are implemented on top of raw
/// 64-bit outputs so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Poisson count, Knuth product method (fine for the small rates used here).
  int poisson(double rate) {
    if (rate <= 0.0) return 0;
    const double limit = std::exp(-rate);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  /// Gumbel-max draw from unnormalized log weights; rows at -inf are never
  /// selected. Returns -1 if every weight is -inf.
  template <class Container>
  int categorical_log(const Container& log_weights) {
    int best = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    int i = 0;
    for (double lw : log_weights) {
      if (lw > -std::numeric_limits<double>::infinity()) {
        const double g = -std::log(-std::log(uniform()));
        const double v = lw + g;
        if (best < 0 || v > best_val) {
          best = i;
          best_val = v;
        }
      }
      ++i;
    }
    return best;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace jumptrack
