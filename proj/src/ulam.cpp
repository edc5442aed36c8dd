#include "ibt/ulam.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ibt/error.hpp"
#include "ibt/numerics.hpp"

namespace ibt {

UlamOperator build_ulam(const InducedSystem& sys, int bins, std::int64_t samples_per_bin,
                        std::uint64_t seed, unsigned threads) {
  if (bins < 16) throw InvalidParameter("build_ulam: bins must be >= 16");
  if (bins > 4096) throw InvalidParameter("build_ulam: bins must be <= 4096");
  if (samples_per_bin < 1) throw InvalidParameter("build_ulam: samples_per_bin must be >= 1");
  const double p = sys.p();
  const double q = sys.q();
  const double a = sys.factor().A();
  const double width = (q - p) / bins;
  const IbtMap& m = sys.map();

  UlamOperator op;
  op.bins = bins;
  op.samples_per_bin = samples_per_bin;
  op.matrix = Eigen::MatrixXd::Zero(bins, bins);
  op.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) op.bin_edges[static_cast<std::size_t>(i)] = p + i * width;
  op.bin_edges.back() = q;

  std::vector<std::int64_t> redrawn(static_cast<std::size_t>(bins), 0);
  parallel_chunks(static_cast<std::size_t>(bins), threads ? threads : default_threads(),
                  [&](std::size_t i) {
    std::mt19937_64 rng = make_stream(seed, i);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    const double lo = op.bin_edges[i];
    const double hi = op.bin_edges[i + 1];
    for (std::int64_t s = 0; s < samples_per_bin; ++s) {
      for (;;) {
        const double x = lo + (hi - lo) * uniform_open(rng);
        if (std::fabs(x - a) < kCutTolerance) {
          ++redrawn[i];
          continue;
        }
        std::int64_t r = 0;
        try {
          r = return_time(sys, x);
        } catch (const TailOverflow&) {
          ++redrawn[i];
          continue;
        }
        FoldedX fx = FoldedX::from(x);
        bool ok = true;
        for (std::int64_t k = 0; k < r && ok; ++k) ok = m.advance_x(fx);
        if (!ok) {
          ++redrawn[i];
          continue;
        }
        const double y = std::clamp(fx.value(), p, q);
        const int j = std::min(bins - 1, static_cast<int>((y - p) / width));
        ++counts[static_cast<std::size_t>(j)];
        break;
      }
    }
    for (int j = 0; j < bins; ++j) {
      op.matrix(static_cast<Eigen::Index>(i), j) =
          static_cast<double>(counts[static_cast<std::size_t>(j)]) /
          static_cast<double>(samples_per_bin);
    }
  });
  for (std::int64_t v : redrawn) op.redrawn += v;
  return op;
}

namespace {

std::vector<std::complex<double>> sorted_top(const Eigen::VectorXcd& ev, int k) {
  std::vector<std::complex<double>> v(ev.data(), ev.data() + ev.size());
  std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  v.resize(static_cast<std::size_t>(k));
  return v;
}

}  // namespace

std::vector<std::complex<double>> leading_spectrum(const UlamOperator& op, int k,
                                                   int max_iterations) {
  if (k < 1 || k > op.bins) throw InvalidParameter("leading_spectrum: need 1 <= k <= bins");
  if (op.bins <= 512) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix, false);
    if (es.info() != Eigen::Success) throw NumericError("leading_spectrum: eigensolver failed");
    return sorted_top(es.eigenvalues(), k);
  }
  // Subspace iteration on a block a little wider than k, with Rayleigh-Ritz.
  const Eigen::Index n = op.bins;
  const Eigen::Index width = std::min<Eigen::Index>(n, k + 8);
  std::mt19937_64 rng = make_stream(0x51ab, 0);
  Eigen::MatrixXd block(n, width);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < width; ++j) block(i, j) = uniform_open(rng) - 0.5;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
  Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, width);
  std::vector<std::complex<double>> prev;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::MatrixXd image = op.matrix * basis;
    const Eigen::MatrixXd small = basis.transpose() * image;
    Eigen::EigenSolver<Eigen::MatrixXd> es(small, false);
    auto cur = sorted_top(es.eigenvalues(), k);
    bool done = !prev.empty();
    for (std::size_t i = 0; done && i < cur.size(); ++i) done = std::abs(cur[i] - prev[i]) < 1e-10;
    if (done) return cur;
    prev = std::move(cur);
    qr.compute(image);
    basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, width);
  }
  throw NumericError("leading_spectrum: subspace iteration did not converge");
}

std::vector<double> invariant_density(const UlamOperator& op, int max_iterations) {
  const Eigen::Index n = op.bins;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd t = op.matrix.transpose();
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd next = t * v;
    next /= next.sum();
    const double change = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    if (change < 1e-13) return {v.data(), v.data() + n};
  }
  throw NumericError("invariant_density: power iteration did not converge");
}

}  // namespace ibt
