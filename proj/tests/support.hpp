#pragma once

// Shared fixtures and small random generators for property tests.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <utility>

#include "ibt/baker.hpp"
#include "ibt/icf.hpp"
#include "ibt/induced.hpp"

namespace ibt::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  /// Contact exponent covering the sub-linear, linear and super-linear regimes.
  double alpha() { return log_uniform(0.4, 3.0); }
  /// Point of [0,1] at distance >= margin from the cut a.
  double away_from(double a, double margin) {
    for (;;) {
      const double x = uniform();
      if (std::fabs(x - a) >= margin) return x;
    }
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Maps and induced systems are cached per family: building the tables is
// the expensive part of most tests.
inline const IbtMap& beta_map(double a0, double a1) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, std::unique_ptr<IbtMap>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{a0, a1}];
  if (!slot) slot = std::make_unique<IbtMap>(make_beta_icf(a0, a1));
  return *slot;
}

inline const InducedSystem& beta_system(double a0, double a1) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, std::unique_ptr<InducedSystem>> cache;
  const IbtMap& m = beta_map(a0, a1);
  std::lock_guard lock(mu);
  auto& slot = cache[{a0, a1}];
  if (!slot) slot = std::make_unique<InducedSystem>(m);
  return *slot;
}

}  // namespace ibt::testing
