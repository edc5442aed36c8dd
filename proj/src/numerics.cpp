#include "ibt/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <numbers>
#include <thread>

#include "ibt/error.hpp"

namespace ibt {

DyadicChebTable::DyadicChebTable(const RealFn& fn, double top, int octaves,
                                 double tail_power)
    : top_(top), tail_power_(tail_power), octaves_(octaves) {
  if (!(top > 0.0) || octaves < 1) {
    throw InvalidParameter("DyadicChebTable: need top > 0 and octaves >= 1");
  }
  top_exponent_ = std::ilogb(top);
  top_floor_ = std::ldexp(1.0, top_exponent_);
  if (top_floor_ == top) {
    --top_exponent_;
    top_floor_ = std::ldexp(1.0, top_exponent_);
  }
  top_inv_width_ = kSub / (top - top_floor_);

  constexpr int n = kDegree + 1;
  data_.assign(static_cast<std::size_t>(octaves) * kSub * kStride, 0.0);

  // Chebyshev basis T_j expressed in monomials, rows j, columns power.
  std::vector<std::vector<double>> cheb(n, std::vector<double>(n, 0.0));
  cheb[0][0] = 1.0;
  cheb[1][1] = 1.0;
  for (int j = 2; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      cheb[j][k] = -cheb[j - 2][k] + (k > 0 ? 2.0 * cheb[j - 1][k - 1] : 0.0);
    }
  }

  std::vector<double> values(n);
  std::vector<double> coef(n);
  for (int o = 0; o < octaves; ++o) {
    const double olo = std::ldexp(1.0, top_exponent_ - o);
    const double ohi = (o == 0) ? top : 2.0 * olo;
    const double width = (ohi - olo) / kSub;
    for (int sidx = 0; sidx < kSub; ++sidx) {
      const double lo = olo + sidx * width;
      const double hi = (sidx == kSub - 1) ? ohi : lo + width;
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      for (int k = 0; k < n; ++k) {
        values[k] = fn(mid + half * std::cos(std::numbers::pi * (k + 0.5) / n));
      }
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
          s += values[k] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
        }
        coef[j] = (j == 0 ? 1.0 : 2.0) * s / n;
      }
      double* c = &data_[static_cast<std::size_t>(o * kSub + sidx) * kStride];
      for (int k = 0; k < n; ++k) {
        double m = 0.0;
        for (int j = k; j < n; ++j) m += coef[j] * cheb[j][k];
        c[k] = m;
      }
      c[kDegree + 1] = mid;
      c[kDegree + 2] = 1.0 / half;
    }
  }
  bottom_ = std::ldexp(1.0, top_exponent_ - octaves + 1);
  bottom_value_ = eval_panel((octaves - 1) * kSub, bottom_);
}

double gauss_legendre(const RealFn& fn, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(fn, a, b);
}

double integrate_adaptive(const RealFn& fn, double a, double b, double tol,
                          unsigned max_depth) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double l1 = 0.0;
  // Boost stops on error <= rel * L1; translate the absolute target.
  Rule::integrate(fn, a, b, 0, 0.0, &err, &l1);
  const double rel = std::max(1e-15, 0.5 * tol / std::max(l1, 1e-300));
  const double value = Rule::integrate(fn, a, b, max_depth, rel, &err);
  if (!std::isfinite(value) || err > tol) {
    throw NumericError("adaptive quadrature did not reach tolerance");
  }
  return value;
}

double integrate_tanh_sinh(const RealFn& fn, double a, double b, double tol) {
  boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(fn, a, b, 1e-14, &err, &l1);
  if (!std::isfinite(value) || err > tol) {
    throw NumericError("tanh-sinh quadrature did not reach tolerance");
  }
  return value;
}

double integrate_square(const std::function<double(double, double)>& fn,
                        double tol) {
  auto inner = [&](double x) {
    return integrate_adaptive([&](double y) { return fn(x, y); }, 0.0, 1.0,
                              tol, 20);
  };
  return integrate_adaptive(inner, 0.0, 1.0, tol, 20);
}

double solve_increasing(
    const std::function<std::pair<double, double>(double)>& fdf, double guess,
    double lo, double hi) {
  if (!(lo <= hi)) throw NumericError("solve_increasing: empty bracket");
  guess = std::clamp(guess, lo, hi);
  std::uintmax_t iters = 200;
  const double root = boost::math::tools::newton_raphson_iterate(
      [&](double v) { return fdf(v); }, guess, lo, hi,
      std::numeric_limits<double>::digits - 2, iters);
  if (!std::isfinite(root)) throw NumericError("solve_increasing: non-finite root");
  return root;
}

double bisect_increasing(const RealFn& fn, double target, double lo, double hi,
                         double width) {
  if (fn(lo) > target || fn(hi) < target) {
    throw NumericError("bisect_increasing: target not bracketed");
  }
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x1b7u};
  return std::mt19937_64(seq);
}

namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned default_threads() {
  const unsigned n = g_threads.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(unsigned n) { g_threads.store(n); }

void parallel_chunks(std::size_t chunks, unsigned threads,
                     const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                                         std::max<std::size_t>(chunks, 1))));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks || failed.load()) return;
        try {
          body(c);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return fit_line_weighted(x, y, w);
}

LineFit fit_line_weighted(std::span<const double> x, std::span<const double> y,
                          std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2) {
    throw InvalidParameter("fit_line: need at least two matching points");
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += w[i] * r * r;
  }
  const double dof = static_cast<double>(x.size()) - 2.0;
  fit.slope_se = dof > 0 ? std::sqrt(rss / dof / sxx) : 0.0;
  return fit;
}

}  // namespace ibt
