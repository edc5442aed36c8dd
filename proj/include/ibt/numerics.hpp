#pragma once

// Numeric kernels shared by the map, induced-system and statistics modules.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace ibt {

using RealFn = std::function<double(double)>;

/// Piecewise polynomial interpolant on (0, top].  Each octave
/// [2^e, 2^(e+1)] is cut into four equal sub-panels carrying a degree-11
/// Chebyshev interpolant (stored in the monomial basis of the local
/// variable, evaluated with Estrin's scheme).  Functions behaving like x^s
/// near zero are thus resolved with relative accuracy.  Below the last
/// octave the function is continued by a power law x^tail_power matched at
/// the lowest node.
class DyadicChebTable {
 public:
  static constexpr int kDegree = 11;
  static constexpr int kSub = 4;
  static constexpr int kStride = kDegree + 3;  // coefficients, centre, 1/half-width

  DyadicChebTable() = default;
  DyadicChebTable(const RealFn& fn, double top, int octaves, double tail_power);

  [[nodiscard]] double operator()(double x) const noexcept {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const int exponent = static_cast<int>(bits >> 52) - 1023;
    const int octave = top_exponent_ - exponent;
    if (octave >= octaves_) [[unlikely]] return tail(x);
    // Inside the top octave (or just above top) the sub-panels are equal
    // slices of [2^E, top]; below it they are read off the mantissa.
    const double slice = std::min((x - top_floor_) * top_inv_width_, kSub - 1.0);
    const int top_sub = static_cast<int>(std::max(slice, 0.0));
    const int mant_sub = static_cast<int>((bits >> 50) & 3u);
    const int panel = octave <= 0 ? top_sub : octave * kSub + mant_sub;
    return eval_panel(panel, x);
  }

  [[nodiscard]] double top() const noexcept { return top_; }
  [[nodiscard]] double bottom() const noexcept { return bottom_; }

 private:
  [[nodiscard]] double eval_panel(int panel, double x) const noexcept {
    const double* c = &data_[static_cast<std::size_t>(panel) * kStride];
    const double t = (x - c[kDegree + 1]) * c[kDegree + 2];
    const double t2 = t * t;
    const double t4 = t2 * t2;
    const double t8 = t4 * t4;
    const double p01 = std::fma(c[1], t, c[0]);
    const double p23 = std::fma(c[3], t, c[2]);
    const double p45 = std::fma(c[5], t, c[4]);
    const double p67 = std::fma(c[7], t, c[6]);
    const double p89 = std::fma(c[9], t, c[8]);
    const double pab = std::fma(c[11], t, c[10]);
    const double q0 = std::fma(p23, t2, p01);
    const double q1 = std::fma(p67, t2, p45);
    const double q2 = std::fma(pab, t2, p89);
    return std::fma(q2, t8, std::fma(q1, t4, q0));
  }
  [[nodiscard]] double tail(double x) const noexcept {
    if (!(x > 0.0)) return 0.0;
    return bottom_value_ * std::pow(x / bottom_, tail_power_);
  }

  double top_ = 0.0;
  double top_floor_ = 0.0;
  double top_inv_width_ = 0.0;
  double bottom_ = 0.0;
  double bottom_value_ = 0.0;
  double tail_power_ = 1.0;
  int top_exponent_ = 0;
  int octaves_ = 0;
  std::vector<double> data_;
};

/// Fixed 20-point Gauss-Legendre rule on [a, b].
double gauss_legendre(const RealFn& fn, double a, double b);

/// Adaptive Gauss-Kronrod quadrature; throws NumericError when the error
/// estimate stays above tol (absolute) after max_depth bisections.
double integrate_adaptive(const RealFn& fn, double a, double b, double tol,
                          unsigned max_depth = 18);

/// Tanh-sinh quadrature, suited to integrands with algebraic behaviour at
/// the endpoints.  Throws NumericError when the error estimate exceeds tol.
double integrate_tanh_sinh(const RealFn& fn, double a, double b, double tol);

/// Adaptive quadrature of a function on the unit square, done as nested
/// one-dimensional rules.
double integrate_square(const std::function<double(double, double)>& fn,
                        double tol);

/// Root of an increasing function on [lo, hi] by safeguarded Newton.
/// `fdf` returns (value, derivative).  `guess` seeds the iteration.
double solve_increasing(const std::function<std::pair<double, double>(double)>& fdf,
                        double guess, double lo, double hi);

/// Bisection on an increasing function, stopped at absolute width `width`.
double bisect_increasing(const RealFn& fn, double target, double lo, double hi,
                         double width);

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Independent, reproducible RNG stream for (seed, stream index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in the open interval (0, 1).
inline double uniform_open(std::mt19937_64& rng) {
  double u;
  do {
    u = std::generate_canonical<double, 53>(rng);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

/// Default worker count: hardware concurrency, overridable globally.
unsigned default_threads();
void set_default_threads(unsigned n);

/// Runs body(chunk) for chunk in [0, chunks) on `threads` workers.  Each
/// chunk must write only its own output slot so results do not depend on
/// scheduling.
void parallel_chunks(std::size_t chunks, unsigned threads,
                     const std::function<void(std::size_t)>& body);

/// Ordinary least-squares slope and intercept of y on x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with weights w_i (typically 1/se_i^2).
LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> w);

}  // namespace ibt
