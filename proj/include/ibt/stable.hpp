#pragma once

// Mean-zero stable laws St(p, a, b), 1 < p <= 2, with characteristic function
//
//   E exp(itZ) = exp(-a |t|^p (1 - i b sgn(t) tan(p pi / 2))).
//
// p = 2 is the normal law N(0, 2a).

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ibt {

struct StableParams {
  double p = 2.0;
  double a = 0.5;
  double b = 0.0;

  /// Throws InvalidParameter unless p in (1,2], a > 0 and b in [-1,1].
  void validate() const;
};

std::complex<double> char_fn(const StableParams& sp, double t);

/// Chambers-Mallows-Stuck samples.  Deterministic in (seed, n) and
/// independent of the thread count.
std::vector<double> sample(const StableParams& sp, std::uint64_t seed, std::int64_t n,
                           unsigned threads = 0);

/// Distribution function by Gil-Pelaez inversion (exact erfc for p = 2).
double cdf(const StableParams& sp, double x);

/// Kolmogorov-Smirnov statistic of the samples against cdf(sp, .).
double ks_distance(std::span<const double> samples, const StableParams& sp);

}  // namespace ibt
