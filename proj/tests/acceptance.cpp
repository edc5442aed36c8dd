// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// diagnostics.  Arguments select a subset of criteria (default: all).
// Exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ibt/baker.hpp"
#include "ibt/cli.hpp"
#include "ibt/error.hpp"
#include "ibt/induced.hpp"
#include "ibt/limits.hpp"
#include "ibt/numerics.hpp"
#include "ibt/stable.hpp"
#include "ibt/ulam.hpp"

namespace {

using namespace ibt;

const std::vector<double> kCfGrid{0.25, 0.5, 1.0, 2.0};

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void note(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.emplace_back(buf);
  }
  // Records a sub-check; the criterion passes only if all of them do.
  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.emplace_back(std::string(ok ? "ok   " : "FAIL ") + buf);
    pass = pass && ok;
  }
};

struct Family {
  double a0;
  double a1;
};

// Families are built once and shared between criteria.
const IbtMap& map_for(Family f) {
  static std::vector<std::pair<std::pair<double, double>, std::unique_ptr<IbtMap>>> cache;
  for (auto& [k, v] : cache) {
    if (k == std::pair{f.a0, f.a1}) return *v;
  }
  cache.emplace_back(std::pair{f.a0, f.a1}, std::make_unique<IbtMap>(make_beta_icf(f.a0, f.a1)));
  return *cache.back().second;
}

const InducedSystem& system_for(Family f) {
  static std::vector<std::pair<std::pair<double, double>, std::unique_ptr<InducedSystem>>> cache;
  for (auto& [k, v] : cache) {
    if (k == std::pair{f.a0, f.a1}) return *v;
  }
  cache.emplace_back(std::pair{f.a0, f.a1}, std::make_unique<InducedSystem>(map_for(f)));
  return *cache.back().second;
}

double sample_variance(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  const double m = s.value() / v.size();
  CompensatedSum q;
  for (double x : v) q.add((x - m) * (x - m));
  return q.value() / (v.size() - 1);
}

double cf_sup_distance(const std::vector<double>& s, const StableParams& sp) {
  const auto emp = empirical_cf(s, kCfGrid);
  double d = 0.0;
  for (std::size_t i = 0; i < kCfGrid.size(); ++i) {
    d = std::max(d, std::abs(emp[i] - char_fn(sp, kCfGrid[i])));
  }
  return d;
}

double empirical_cdf_at_zero(const std::vector<double>& s) {
  const auto below = std::count_if(s.begin(), s.end(), [](double v) { return v <= 0.0; });
  return static_cast<double>(below) / s.size();
}

// ------------------------------------------------------------------ 1

Outcome map_identities() {
  Outcome o;
  const Family fams[] = {{1, 1}, {2, 2}, {0.5, 0.5}, {2, 1}, {0.7, 1.4}};
  auto rng = make_stream(101, 0);
  for (Family f : fams) {
    const IbtMap& m = map_for(f);
    const FactorMap& fm = m.factor();
    double inv = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = (i + 0.5) / 1000.0;
      inv = std::max({inv, std::fabs(fm.f(fm.w0(x)) - x), std::fabs(fm.f(fm.w1(x)) - x)});
    }
    double jac = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const SquarePoint pt{uniform_open(rng), uniform_open(rng)};
      if (std::fabs(pt.x - fm.A()) < 1e-9) continue;
      jac = std::max(jac, std::fabs(jacobian_det(m, pt) - 1.0));
    }
    double leb = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double a = uniform_open(rng);
      double b = uniform_open(rng);
      if (a > b) std::swap(a, b);
      leb = std::max(leb, std::fabs((fm.w0(b) - fm.w0(a)) + (fm.w1(b) - fm.w1(a)) - (b - a)));
      const double x = uniform_open(rng);
      const double l = fm.w0(x);
      const double r = fm.w1(x);
      if (std::fabs(l - fm.A()) > 1e-9 && std::fabs(r - fm.A()) > 1e-9) {
        leb = std::max(leb, std::fabs(1.0 / fm.Df(l) + 1.0 / fm.Df(r) - 1.0));
      }
    }
    o.check(inv <= 1e-10, "beta(%g,%g) max |f(w_j(x)) - x| = %.3g (<= 1e-10)", f.a0, f.a1, inv);
    o.check(jac <= 1e-10, "beta(%g,%g) max |det DB - 1| = %.3g (<= 1e-10)", f.a0, f.a1, jac);
    o.check(leb <= 1e-9, "beta(%g,%g) two-branch Lebesgue identity error %.3g (<= 1e-9)", f.a0,
            f.a1, leb);
  }
  return o;
}

// ------------------------------------------------------------------ 2

Outcome orbit_asymptotics() {
  Outcome o;
  constexpr std::int64_t n = 100000;
  const InducedSystem& lin = system_for({1, 1});
  const auto& p = lin.cells().p_seq;
  const double np = n * p[n];
  const double n2dp = static_cast<double>(n) * n * (p[n] - p[n + 1]);
  o.check(np >= 1.96 && np <= 2.04, "beta(1,1) n p_n = %.5f at n = 1e5 (in [1.96, 2.04])", np);
  o.check(n2dp >= 1.9 && n2dp <= 2.1, "beta(1,1) n^2 (p_n - p_{n+1}) = %.5f (in [1.9, 2.1])", n2dp);
  for (Family f : {Family{2, 2}, Family{0.5, 0.5}}) {
    const OrbitAsymptoticsReport rep = check_orbit_asymptotics(system_for(f), n);
    for (const auto& c : rep.checks) {
      if (c.name == "p_n" || c.name == "1-q_n") {
        o.check(std::fabs(c.ratio - 1.0) <= 0.05, "beta(%g,%g) %s measured/predicted = %.5f", f.a0,
                f.a1, c.name.c_str(), c.ratio);
      } else {
        o.note("beta(%g,%g) %s measured/predicted = %.5f (info)", f.a0, f.a1, c.name.c_str(), c.ratio);
      }
    }
  }
  return o;
}

// ------------------------------------------------------------------ 3

Outcome return_tail() {
  Outcome o;
  for (double a : {0.5, 1.0, 2.0}) {
    const InducedSystem& sys = system_for({a, a});
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::int64_t n = 100; n <= 10000; ++n) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(cell_measure(sys, n)));
    }
    const double slope = fit_line(lx, ly).slope;
    const double target = -(2.0 + 1.0 / a);
    o.check(std::fabs(slope - target) <= 0.05,
            "alpha=%g fitted exponent %.4f, target %.4f +- 0.05 (OLS over every n in [1e2,1e4])", a,
            slope, target);
  }
  return o;
}

// ------------------------------------------------------------------ 4

Outcome kac() {
  Outcome o;
  for (Family f : {Family{1, 1}, Family{2, 2}, Family{0.5, 0.5}, Family{2, 1}}) {
    const InducedSystem& sys = system_for(f);
    const double mean = mean_return_time(sys);
    const double target = (f.a0 == 1 && f.a1 == 1) ? 3.0 + 2.0 * std::sqrt(2.0) : 1.0 / sys.leb();
    const double rel = std::fabs(mean / target - 1.0);
    o.check(rel <= 1e-3, "beta(%g,%g) sum n lambda[r=n] = %.8f, target %.8f, rel err %.2e", f.a0,
            f.a1, mean, target, rel);
  }
  return o;
}

// ------------------------------------------------------------------ 5

Outcome induced_invariance() {
  Outcome o;
  constexpr int kGrid = 32;
  constexpr std::int64_t kPoints = 1000000;
  constexpr std::int64_t kChunk = 1 << 14;
  for (Family f : {Family{1, 1}, Family{2, 2}, Family{0.5, 0.5}}) {
    const InducedSystem& sys = system_for(f);
    const auto chunks = static_cast<std::size_t>((kPoints + kChunk - 1) / kChunk);
    std::vector<std::vector<std::int64_t>> counts(chunks, std::vector<std::int64_t>(kGrid * kGrid));
    std::vector<std::int64_t> redrawn(chunks, 0);
    parallel_chunks(chunks, default_threads(), [&](std::size_t c) {
      auto rng = make_stream(505, c);
      const std::int64_t todo = std::min<std::int64_t>(kChunk, kPoints - c * kChunk);
      for (std::int64_t i = 0; i < todo;) {
        const double x = sys.p() + sys.leb() * uniform_open(rng);
        const double y = uniform_open(rng);
        InducedStep s;
        try {
          s = induced_step(sys, {x, y});
        } catch (const NearCutError&) {
          ++redrawn[c];
          continue;
        } catch (const TailOverflow&) {
          ++redrawn[c];
          continue;
        }
        const int gi = std::min(kGrid - 1, static_cast<int>((s.point.x - sys.p()) / sys.leb() * kGrid));
        const int gj = std::min(kGrid - 1, static_cast<int>(s.point.y * kGrid));
        ++counts[c][gi * kGrid + gj];
        ++i;
      }
    });
    std::vector<double> total(kGrid * kGrid, 0.0);
    std::int64_t skipped = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
      for (int k = 0; k < kGrid * kGrid; ++k) total[k] += counts[c][k];
      skipped += redrawn[c];
    }
    const double expected = static_cast<double>(kPoints) / total.size();
    double chi2 = 0.0;
    for (double v : total) chi2 += (v - expected) * (v - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(total.size() - 1));
    const double pval = boost::math::cdf(boost::math::complement(dist, chi2));
    o.check(pval > 1e-3, "beta(%g,%g) chi2 = %.1f on 1023 dof, p-value %.4f (> 1e-3), redrawn %lld",
            f.a0, f.a1, chi2, pval, static_cast<long long>(skipped));
  }
  return o;
}

// ------------------------------------------------------------------ 6

std::vector<std::int64_t> decade_lags(std::int64_t lo, std::int64_t hi, int per_decade) {
  std::vector<std::int64_t> lags;
  for (int i = 0;; ++i) {
    const auto k = static_cast<std::int64_t>(
        std::llround(static_cast<double>(lo) * std::pow(10.0, static_cast<double>(i) / per_decade)));
    if (k > hi) break;
    if (lags.empty() || k != lags.back()) lags.push_back(k);
  }
  return lags;
}

Outcome sharp_decay() {
  Outcome o;
  const auto lags = decade_lags(10, 1000, 10);
  constexpr std::int64_t kTraj = 4000;
  constexpr std::int64_t kWindow = 50000;
  constexpr double kWidth = 0.05;
  o.note("psi = eta = smoothed indicator of the base, inner ramp width %.2f", kWidth);
  o.note("%lld trajectories x window %lld = %.1e products per lag", static_cast<long long>(kTraj),
         static_cast<long long>(kWindow), static_cast<double>(kTraj * kWindow));
  for (double a : {1.0, 2.0}) {
    const InducedSystem& sys = system_for({a, a});
    const Observable ind = smoothed_base_indicator(sys, kWidth);
    const auto est = correlation_profile(sys.map(), ind, ind, lags, kTraj, kWindow, 606);
    std::vector<double> lx;
    std::vector<double> ly;
    std::string trace;
    for (const auto& e : est) {
      if (e.cor > 0.0) {
        lx.push_back(std::log(static_cast<double>(e.k)));
        ly.push_back(std::log(e.cor));
      }
      if (e.k == 10 || e.k == 100 || e.k == 1000) {
        char buf[96];
        std::snprintf(buf, sizeof buf, " Cor(%lld)=%.3e+-%.1e", static_cast<long long>(e.k), e.cor, e.se);
        trace += buf;
      }
    }
    const LineFit fit = fit_line(lx, ly);
    o.check(std::fabs(fit.slope + 1.0 / a) <= 0.15,
            "alpha=%g slope %.4f +- %.4f, target %.4f +- 0.15;%s", a, fit.slope, fit.slope_se,
            -1.0 / a, trace.c_str());
  }
  return o;
}

// ------------------------------------------------------------------ 7

Outcome case_clt() {
  Outcome o;
  const InducedSystem& sys = system_for({0.5, 0.5});
  const Observable obs = linear_y();
  const LimitPrediction lp = predict_limit(obs, sys);
  o.check(lp.case_id == LimitCase::kClt, "predicted case %s", to_string(lp.case_id).c_str());
  const GreenKubo gk = green_kubo(obs, sys.map(), 200, 2000, 5000, 707);
  o.note("Green-Kubo sigma^2 = %.5f +- %.5f (%lld lags)", gk.sigma2, gk.sigma2_se,
         static_cast<long long>(gk.lags_used));
  constexpr std::int64_t n = 10000;
  constexpr std::int64_t n_traj = 100000;
  const EnsembleResult ens = birkhoff_ensemble(obs, sys.map(), n, n_traj, 708,
                                               std::sqrt(gk.sigma2 * n));
  const double ks = ks_distance(ens.sums, StableParams{2.0, 0.5, 0.0});
  o.note("ensemble variance of S_n/(sigma sqrt n) = %.4f, redrawn %lld", sample_variance(ens.sums),
         static_cast<long long>(ens.redrawn));
  o.check(ks <= 0.02, "KS to N(0,1) = %.4f (<= 0.02), n = 1e4, n_traj = 1e5", ks);
  return o;
}

// ------------------------------------------------------------------ 8

// kappa for quadratic_x giving skewness b with equal exponents alpha:
// |M0/M1|^{1+1/alpha} = (1+b)/(1-b).
double kappa_for_skew(double b, double alpha) {
  const double r = std::pow((1.0 + b) / (1.0 - b), alpha / (alpha + 1.0));
  return 3.0 * (r - 1.0) / (r + 1.0);
}

Outcome case_two_sided() {
  Outcome o;
  const InducedSystem& sys = system_for({2, 2});
  const Observable obs = linear_x();
  const LimitPrediction lp = predict_limit(obs, sys);
  o.check(lp.case_id == LimitCase::kStableTwoSided && lp.stable.has_value(), "predicted case %s",
          to_string(lp.case_id).c_str());
  if (!lp.stable) return o;
  const StableParams law = *lp.stable;
  const StableParams renewal = *lp.stable_renewal;
  constexpr std::int64_t n = 10000;
  const EnsembleResult ens = birkhoff_ensemble(obs, sys.map(), n, 100000, 808, lp.norm(n));
  const double ks = ks_distance(ens.sums, law);
  const double cf = cf_sup_distance(ens.sums, law);
  o.note("law St(%.4f, %.5f, %.3f) from predict_limit", law.p, law.a, law.b);
  o.check(ks <= 0.05, "KS of S_n/n^(2/3) to the predicted law = %.4f (<= 0.05)", ks);
  o.check(cf <= 0.05, "sup CF distance on t in {0.25,0.5,1,2} = %.4f (<= 0.05)", cf);
  o.note("with the renewal factor Leb(Lambda) = %.5f kept in the scale, a = %.5f:", sys.leb(),
         renewal.a);
  o.note("  KS %.4f, sup CF distance %.4f (diagnostic)", ks_distance(ens.sums, renewal),
         cf_sup_distance(ens.sums, renewal));

  for (double b : {0.5, -0.5}) {
    // X -> -X flips the skewness, so the b < 0 fixture is the mirror image.
    const double kappa = kappa_for_skew(std::fabs(b), 2.0);
    const Observable fx = scaled(quadratic_x(kappa), b > 0 ? 1.0 : -1.0);
    const LimitPrediction fp = predict_limit(fx, sys);
    const EnsembleResult fe = birkhoff_ensemble(fx, sys.map(), n, 20000, 809, fp.norm(n));
    const double emp0 = empirical_cdf_at_zero(fe.sums);
    const double pred0 = cdf(*fp.stable, 0.0);
    const bool same = (emp0 - 0.5) * (pred0 - 0.5) > 0.0;
    o.check(same,
            "fixture kappa=%.4f sign %+g: predicted b = %+.4f, cdf(0) = %.4f, empirical F(0) = %.4f",
            kappa, b > 0 ? 1.0 : -1.0, fp.stable->b, pred0, emp0);
  }
  return o;
}

// ------------------------------------------------------------------ 9

Outcome case_nonstandard() {
  Outcome o;
  const InducedSystem& sys = system_for({1, 1});
  const Observable obs = linear_x();
  const LimitPrediction lp = predict_limit(obs, sys);
  o.check(lp.case_id == LimitCase::kNonstandardClt && lp.variance.has_value(), "predicted case %s",
          to_string(lp.case_id).c_str());
  if (!lp.variance) return o;
  constexpr std::int64_t n = 100000;
  const EnsembleResult ens = birkhoff_ensemble(obs, sys.map(), n, 100000, 909, lp.norm(n));
  const double var = sample_variance(ens.sums);
  const double ratio = var / *lp.variance;
  o.check(std::fabs(ratio - 1.0) <= 0.15,
          "Var S_n/sqrt(n log n) = %.4f vs C0 + C1 = %.4f, ratio %.4f (within 15%%)", var,
          *lp.variance, ratio);
  o.note("with the renewal factor Leb(Lambda) = %.5f: predicted %.4f, ratio %.4f (diagnostic)",
         sys.leb(), *lp.variance_renewal, var / *lp.variance_renewal);
  // Gaussian-equivalent variance from the interquartile range, insensitive
  // to the rare large sums that dominate the sample variance.
  std::vector<double> sorted = ens.sums;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = sorted[sorted.size() * 3 / 4] - sorted[sorted.size() / 4];
  const double robust = std::pow(iqr / 1.3489795, 2);
  o.note("IQR-based variance %.4f: ratio %.4f verbatim, %.4f renewal (diagnostic)", robust,
         robust / *lp.variance, robust / *lp.variance_renewal);
  return o;
}

// ------------------------------------------------------------------ 10

Outcome xi_diagnostics() {
  Outcome o;
  const InducedSystem& sys = system_for({2, 2});
  const Observable obs = linear_x();
  const Moments mom = moments_M(obs, sys);
  const ReturnCells& c = sys.cells();
  auto rng = make_stream(1010, 0);
  double lo = INFINITY;
  double hi = -INFINITY;
  int evaluated = 0;
  // Cells [r = n] on the M0 side are [p°_n, p°_{n-1}) to the right of A.
  for (std::int64_t n : decade_lags(1000, 100000, 8)) {
    for (int i = 0; i < 10; ++i) {
      const double x = c.p_int(n) + (c.p_int(n - 1) - c.p_int(n)) * uniform_open(rng);
      const XiValue v = xi(obs, sys, {x, uniform_open(rng)});
      if (v.r != n) continue;
      const double ratio = v.xi / (static_cast<double>(v.r) * mom.M0);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      ++evaluated;
    }
  }
  o.check(lo >= 0.9 && hi <= 1.1 && evaluated > 0,
          "xi/(r M0) over %d points with r in [1e3, 1e5]: min %.4f, max %.4f (in [0.9, 1.1])",
          evaluated, lo, hi);

  const std::vector<double> ts{1.0, 2.0, 5.0, 10.0, 100.0, 1000.0};
  const XiTailReport rep = xi_tail(obs, sys, ts, 100000000, 1011);
  double wrong_right = 0.0;
  double wrong_left = 0.0;
  for (const XiTailRow& row : rep.rows) {
    wrong_right = std::max(wrong_right, row.right_lower);
    wrong_left = std::max(wrong_left, row.left_upper);
  }
  o.note("%lld samples, %lld censored; M0 = %.4f, M1 = %.4f", static_cast<long long>(rep.samples),
         static_cast<long long>(rep.censored), rep.M0, rep.M1);
  o.check(wrong_right == 0.0, "lambda([xi < -t] n [A,q]) = %.3g for all t >= 1 (exactly 0)", wrong_right);
  o.check(wrong_left == 0.0, "lambda([xi > t] n [p,A]) = %.3g for all t >= 1 (exactly 0)", wrong_left);
  for (const XiTailRow& row : rep.rows) {
    o.note("t=%-6g right tail %.4e (C0 t^-p %.4e)  left tail %.4e (C1 t^-p %.4e)", row.t,
           row.right_upper, row.predicted_right, row.left_lower, row.predicted_left);
  }
  return o;
}

// ------------------------------------------------------------------ 11

Outcome stable_kernel() {
  Outcome o;
  const LimitPrediction lp = predict_limit(linear_x(), system_for({2, 2}));
  std::vector<StableParams> laws{{1.5, 1.0, 0.0}, {1.5, 1.0, 1.0}, {1.5, 1.0, -1.0},
                                 {1.2, 0.7, 0.5}, {1.8, 2.0, -0.3}, {2.0, 0.5, 0.0}};
  if (lp.stable) laws.push_back(*lp.stable);
  std::uint64_t seed = 1111;
  for (const StableParams& sp : laws) {
    const auto s = sample(sp, seed++, 1000000);
    const double d = cf_sup_distance(s, sp);
    o.check(d <= 0.02, "St(%g, %.4g, %g): sup CF distance %.4f at n = 1e6 (<= 0.02)", sp.p, sp.a,
            sp.b, d);
  }
  const double a = 0.7;
  const auto g = sample({2.0, a, 0.0}, 1120, 1000000);
  const double var = sample_variance(g);
  CompensatedSum m4;
  for (double v : g) m4.add(std::pow(v, 4));
  const double se = std::sqrt((m4.value() / g.size() - var * var) / g.size());
  o.check(std::fabs(var - 2 * a) <= 3 * se, "p = 2, a = %.2f: variance %.5f vs 2a = %.5f, SE %.5f",
          a, var, 2 * a, se);
  return o;
}

// ------------------------------------------------------------------ 12

Outcome ulam() {
  Outcome o;
  const UlamOperator op = build_ulam(system_for({1, 1}), 256, 10000, 1212);
  const auto ev = leading_spectrum(op, 10);
  const auto rho = invariant_density(op);
  double dev = 0.0;
  for (double v : rho) dev = std::max(dev, std::fabs(v * op.bins - 1.0));
  o.check(std::fabs(ev[0] - 1.0) <= 1e-3, "leading eigenvalue %.8f%+.2ei", ev[0].real(), ev[0].imag());
  o.check(dev <= 0.1, "max relative deviation of the Perron vector from flat %.4f (<= 0.1)", dev);
  o.check(std::abs(ev[1]) < 0.95, "|lambda_2| = %.4f (< 0.95)", std::abs(ev[1]));
  double other = 0.0;
  for (std::size_t i = 1; i < ev.size(); ++i) other = std::max(other, std::abs(ev[i]));
  o.check(other <= 0.99, "largest modulus away from 1 among the top 10: %.4f (<= 0.99)", other);
  o.note("256 bins, 1e4 samples per bin, %lld redrawn", static_cast<long long>(op.redrawn));
  return o;
}

// ------------------------------------------------------------------ 13

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"ibt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ibt_acceptance";
  fs::create_directories(dir);
  const auto config = [&](const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p.string();
  };
  struct Job {
    std::string label;
    std::vector<std::string> args;
  };
  const std::vector<Job> jobs{
      {"6 correlations", {"correlations", "--alpha0", "2", "--alpha1", "2", "--kmax", "1000",
                          "--samples", "2000000", "--window", "5000", "--seed", "6"}},
      {"7 CLT", {"limit-law", "--config",
                 config("c7.json", R"({"alpha0": 0.5, "alpha1": 0.5, "observable": {"kind": "linear-y"},
                    "n": 2000, "n_traj": 2000, "seed": 7, "green_kubo": {"n_traj": 200, "window": 2000}})")}},
      {"8 two-sided stable", {"limit-law", "--config",
                              config("c8.json", R"({"alpha0": 2, "alpha1": 2, "observable": {"kind": "linear-x"},
                                 "n": 2000, "n_traj": 5000, "seed": 8})")}},
      {"9 nonstandard CLT", {"limit-law", "--config",
                             config("c9.json", R"({"alpha0": 1, "alpha1": 1, "observable": {"kind": "linear-x"},
                                "n": 10000, "n_traj": 5000, "seed": 9})")}},
  };
  int idx = 0;
  for (const Job& job : jobs) {
    std::string bytes[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("run" + std::to_string(idx) + "_" + std::to_string(rep));
      std::vector<std::string> args{"--threads", rep == 0 ? "1" : "3"};
      args.insert(args.end(), job.args.begin(), job.args.end());
      args.insert(args.end(), {"--out", out.string()});
      ran = ran && run_cli(args) == 0;
      bytes[rep] = slurp(out);
    }
    o.check(ran && !bytes[0].empty() && bytes[0] == bytes[1],
            "criterion %s: two runs (1 and 3 threads) byte-identical, %zu bytes", job.label.c_str(),
            bytes[0].size());
    ++idx;
  }
  set_default_threads(0);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "map identities", map_identities},
      {2, "orbit asymptotics", orbit_asymptotics},
      {3, "return-time tail exponent", return_tail},
      {4, "Kac's lemma", kac},
      {5, "induced-map invariance", induced_invariance},
      {6, "sharp correlation decay", sharp_decay},
      {7, "case i: CLT", case_clt},
      {8, "case iii: two-sided stable law", case_two_sided},
      {9, "case iv: nonstandard CLT", case_nonstandard},
      {10, "xi diagnostics", xi_diagnostics},
      {11, "stable kernel", stable_kernel},
      {12, "Ulam spectrum", ulam},
      {13, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.lines.push_back(std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s (%.1f s)\n", c.id, out.pass ? "PASS" : "FAIL", c.title, secs);
    for (const auto& line : out.lines) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
