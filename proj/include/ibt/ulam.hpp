#pragma once

// Ulam discretization of the induced factor map u(x) = f^{r(x)}(x) on [p,q].

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ibt/induced.hpp"

namespace ibt {

struct UlamOperator {
  int bins = 0;
  Eigen::MatrixXd matrix;  // row i: distribution of u-images of bin i
  std::vector<double> bin_edges;
  std::int64_t samples_per_bin = 0;
  std::int64_t redrawn = 0;  // samples replaced after a cut hit or tail overflow
};

/// Monte Carlo Ulam matrix: samples_per_bin uniform points in each bin,
/// bin i drawn from RNG stream (seed, i).
UlamOperator build_ulam(const InducedSystem& sys, int bins, std::int64_t samples_per_bin,
                        std::uint64_t seed, unsigned threads = 0);

/// The k eigenvalues of largest modulus, sorted by modulus descending.  Dense
/// solve for bins <= 512, orthogonal subspace iteration above that.
std::vector<std::complex<double>> leading_spectrum(const UlamOperator& op, int k,
                                                   int max_iterations = 20000);

/// Left Perron vector (invariant density on the bins), normalized to sum 1.
std::vector<double> invariant_density(const UlamOperator& op, int max_iterations = 100000);

}  // namespace ibt
