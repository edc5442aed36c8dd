#include "ibt/limits.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "ibt/error.hpp"
#include "ibt/numerics.hpp"

namespace ibt {

namespace {

constexpr double kMeanZeroTol = 1e-6;
constexpr double kZeroMoment = 1e-10;

Observable finish(Observable o) {
  o.mean_zero = std::fabs(integral(o)) <= kMeanZeroTol;
  return o;
}

}  // namespace

Observable linear_x(double scale) {
  Observable o;
  o.kind = "linear-x";
  o.params = {scale};
  o.eval = [scale](double x, double) { return scale * (0.5 - x); };
  o.uses_y = false;
  o.mean_zero = true;
  return o;
}

Observable linear_y(double scale) {
  Observable o;
  o.kind = "linear-y";
  o.params = {scale};
  o.eval = [scale](double, double y) { return scale * (y - 0.5); };
  o.mean_zero = true;
  return o;
}

Observable quadratic_x(double kappa, double scale) {
  Observable o;
  o.kind = "quadratic-x";
  o.params = {kappa, scale};
  o.eval = [kappa, scale](double x, double) {
    return scale * ((0.5 - x) + kappa * (x * x - x + 1.0 / 6.0));
  };
  o.uses_y = false;
  o.mean_zero = true;
  return o;
}

Observable custom_grid(int nx, int ny, std::vector<double> values) {
  if (nx < 1 || ny < 1) throw InvalidParameter("custom_grid: nx and ny must be >= 1");
  const auto expected = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
  if (values.size() != expected) {
    throw InvalidParameter("custom_grid: expected (nx+1)*(ny+1) values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidParameter("custom_grid: values must be finite");
  }
  Observable o;
  o.kind = "custom-grid";
  o.params = values;
  o.params.insert(o.params.begin(), {static_cast<double>(nx), static_cast<double>(ny)});
  auto grid = std::make_shared<const std::vector<double>>(std::move(values));
  o.eval = [grid, nx, ny](double x, double y) {
    const double gx = std::clamp(x, 0.0, 1.0) * nx;
    const double gy = std::clamp(y, 0.0, 1.0) * ny;
    const int i = std::min(static_cast<int>(gx), nx - 1);
    const int j = std::min(static_cast<int>(gy), ny - 1);
    const double u = gx - i;
    const double v = gy - j;
    const auto at = [&](int a, int b) { return (*grid)[static_cast<std::size_t>(a * (ny + 1) + b)]; };
    return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
           u * v * at(i + 1, j + 1);
  };
  bool y_free = true;
  for (int i = 0; i <= nx && y_free; ++i) {
    for (int j = 1; j <= ny; ++j) {
      if ((*grid)[static_cast<std::size_t>(i * (ny + 1) + j)] !=
          (*grid)[static_cast<std::size_t>(i * (ny + 1))]) {
        y_free = false;
        break;
      }
    }
  }
  o.uses_y = !y_free;
  for (int i = 1; i < nx; ++i) o.breaks_x.push_back(static_cast<double>(i) / nx);
  for (int j = 1; j < ny; ++j) o.breaks_y.push_back(static_cast<double>(j) / ny);
  return finish(std::move(o));
}

Observable constant_observable(double c) {
  Observable o;
  o.kind = "constant";
  o.params = {c};
  o.eval = [c](double, double) { return c; };
  o.uses_y = false;
  o.mean_zero = c == 0.0;
  return o;
}

Observable smoothed_base_indicator(const InducedSystem& sys, double width) {
  const double p = sys.p();
  const double q = sys.q();
  if (!(width > 0.0 && 2.0 * width < q - p)) {
    throw InvalidParameter("smoothed_base_indicator: width must be in (0, Leb/2)");
  }
  Observable o;
  o.kind = "smoothed-base-indicator";
  o.params = {width};
  o.eval = [p, q, width](double x, double) {
    return std::clamp(std::min(x - p, q - x) / width, 0.0, 1.0);
  };
  o.uses_y = false;
  o.mean_zero = false;
  o.breaks_x = {p, p + width, q - width, q};
  return o;
}

Observable scaled(const Observable& obs, double s) {
  Observable o = obs;
  o.params.push_back(s);
  o.kind = obs.kind + "*scaled";
  auto inner = obs.eval;
  o.eval = [inner, s](double x, double y) { return s * inner(x, y); };
  return o;
}

namespace {

double piecewise(const std::function<double(double)>& fn, const std::vector<double>& breaks,
                 double tol) {
  std::vector<double> cuts{0.0};
  for (double b : breaks) {
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  }
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double piece_tol = tol / static_cast<double>(cuts.size() - 1);
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total.add(integrate_adaptive(fn, cuts[i], cuts[i + 1], piece_tol));
  }
  return total.value();
}

}  // namespace

double integral(const Observable& obs, double tol) {
  if (!obs.uses_y) {
    return piecewise([&](double x) { return obs.eval(x, 0.5); }, obs.breaks_x, tol);
  }
  return piecewise(
      [&](double x) {
        return piecewise([&](double y) { return obs.eval(x, y); }, obs.breaks_y, tol);
      },
      obs.breaks_x, tol);
}

Moments moments_M(const Observable& obs, const InducedSystem& sys) {
  const CutFunction& cf = sys.factor().cut();
  const double e0 = 1.0 + 1.0 / cf.alpha0();
  const double e1 = 1.0 + 1.0 / cf.alpha1();
  Moments m;
  m.M0 = integrate_adaptive([&](double y) { return obs.eval(0.0, std::pow(y, e0)); }, 0.0, 1.0,
                            1e-10);
  m.M1 = integrate_adaptive([&](double y) { return obs.eval(1.0, std::pow(y, e1)); }, 0.0, 1.0,
                            1e-10);
  return m;
}

TailConstants constants_C(double M0, double M1, const InducedSystem& sys) {
  const CutFunction& cf = sys.factor().cut();
  const double leb = sys.leb();
  auto one = [leb](double m, double al, double c) {
    const double am = std::fabs(m);
    if (am == 0.0) return 0.0;
    return am / (al * leb) * std::pow(am * (al + 1.0) / (c * al), 1.0 / al);
  };
  return {one(M0, cf.alpha0(), cf.c0()), one(M1, cf.alpha1(), cf.c1())};
}

XiValue xi(const Observable& obs, const InducedSystem& sys, SquarePoint pt) {
  if (!(pt.y >= 0.0 && pt.y <= 1.0)) throw DomainError("xi: y outside [0,1]");
  const std::int64_t r = return_time(sys, pt.x);
  const IbtMap& m = sys.map();
  OrbitState s = OrbitState::from(pt);
  double sum = 0.0;
  for (std::int64_t k = 0; k < r; ++k) {
    const SquarePoint cur = s.point();
    sum += obs.eval(cur.x, cur.y);
    if (k + 1 < r && !m.advance(s)) {
      throw NearCutError("xi: orbit hit the cut at iterate " + std::to_string(k), k);
    }
  }
  return {sum, r};
}

XiTailReport xi_tail(const Observable& obs, const InducedSystem& sys,
                     std::span<const double> t_grid, std::int64_t samples, std::uint64_t seed,
                     unsigned threads) {
  if (samples < 1) throw InvalidParameter("xi_tail: samples must be >= 1");
  XiTailReport rep;
  const Moments mom = moments_M(obs, sys);
  if (std::fabs(mom.M0) <= kZeroMoment && std::fabs(mom.M1) <= kZeroMoment) {
    throw InvalidParameter("xi_tail: needs M0 != 0 or M1 != 0");
  }
  const TailConstants tc = constants_C(mom.M0, mom.M1, sys);
  rep.samples = samples;
  rep.M0 = mom.M0;
  rep.M1 = mom.M1;
  rep.C0 = tc.C0;
  rep.C1 = tc.C1;

  const std::size_t nt = t_grid.size();
  constexpr std::int64_t kChunk = 1 << 14;
  const auto chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  // counts[c][4*i + side] for chunk c and threshold i.
  std::vector<std::vector<std::int64_t>> counts(chunks, std::vector<std::int64_t>(4 * nt, 0));
  std::vector<std::int64_t> censored(chunks, 0);
  const double a = sys.factor().A();
  const IbtMap& m = sys.map();

  parallel_chunks(chunks, threads ? threads : default_threads(), [&](std::size_t c) {
    std::mt19937_64 rng = make_stream(seed, c);
    const std::int64_t lo = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t hi = std::min(samples, lo + kChunk);
    std::vector<std::int64_t>& cnt = counts[c];
    for (std::int64_t i = lo; i < hi; ++i) {
      double value = 0.0;
      double x = 0.0;
      for (;;) {
        x = sys.p() + (sys.q() - sys.p()) * uniform_open(rng);
        const double y = uniform_open(rng);
        if (std::fabs(x - a) < kCutTolerance) continue;
        try {
          value = ibt::xi(obs, sys, {x, y}).xi;
        } catch (const TailOverflow&) {
          // Censored: keep the partial sum over r_max steps.
          ++censored[c];
          OrbitState s = OrbitState::from({x, y});
          value = 0.0;
          for (std::int64_t k = 0; k < sys.r_max(); ++k) {
            const SquarePoint cur = s.point();
            value += obs.eval(cur.x, cur.y);
            if (!m.advance(s)) break;
          }
        } catch (const NearCutError&) {
          continue;
        }
        break;
      }
      const int side = x > a ? 0 : 2;
      for (std::size_t t = 0; t < nt; ++t) {
        if (value > t_grid[t]) ++cnt[4 * t + side];
        if (value < -t_grid[t]) ++cnt[4 * t + side + 1];
      }
    }
  });

  const CutFunction& cf = sys.factor().cut();
  for (std::size_t t = 0; t < nt; ++t) {
    std::int64_t tot[4] = {0, 0, 0, 0};
    for (std::size_t c = 0; c < chunks; ++c) {
      for (int s = 0; s < 4; ++s) tot[s] += counts[c][4 * t + s];
    }
    const double n = static_cast<double>(samples);
    XiTailRow row;
    row.t = t_grid[t];
    row.right_upper = tot[0] / n;
    row.right_lower = tot[1] / n;
    row.left_upper = tot[2] / n;
    row.left_lower = tot[3] / n;
    row.predicted_right = tc.C0 * std::pow(row.t, -(1.0 + 1.0 / cf.alpha0()));
    row.predicted_left = tc.C1 * std::pow(row.t, -(1.0 + 1.0 / cf.alpha1()));
    rep.rows.push_back(row);
  }
  for (std::int64_t v : censored) rep.censored += v;
  return rep;
}

namespace {

// Draws a Lebesgue-uniform start whose next `steps` iterates avoid the cut
// and fills values of the two observables along the orbit.  Returns the
// number of discarded starts.
std::int64_t sample_orbit(const IbtMap& m, const Observable& psi, const Observable& eta,
                          std::int64_t steps, std::mt19937_64& rng, std::vector<double>& vpsi,
                          std::vector<double>& veta) {
  std::int64_t redrawn = 0;
  const bool need_y = psi.uses_y || eta.uses_y;
  vpsi.resize(static_cast<std::size_t>(steps));
  veta.resize(static_cast<std::size_t>(steps));
  for (;;) {
    OrbitState s = OrbitState::from({uniform_open(rng), uniform_open(rng)});
    bool ok = true;
    for (std::int64_t j = 0; j < steps; ++j) {
      const SquarePoint pt = s.point();
      vpsi[static_cast<std::size_t>(j)] = psi.eval(pt.x, pt.y);
      veta[static_cast<std::size_t>(j)] = eta.eval(pt.x, pt.y);
      if (j + 1 == steps) break;
      if (!(need_y ? m.advance(s) : m.advance_x(s.x))) {
        ok = false;
        break;
      }
    }
    if (ok) return redrawn;
    ++redrawn;
  }
}

}  // namespace

CorrelationEstimate correlation(const IbtMap& m, const Observable& psi, const Observable& eta,
                                std::int64_t k, std::int64_t n_samples, std::uint64_t seed,
                                unsigned threads) {
  if (k < 0) throw InvalidParameter("correlation: k must be >= 0");
  if (n_samples < 64) throw InvalidParameter("correlation: n_samples must be >= 64");
  const double mpsi = integral(psi);
  const double meta = integral(eta);
  // 64 independent replicates, each stratified in x over n/64 strata.
  constexpr std::size_t kGroups = 64;
  const std::int64_t per = n_samples / static_cast<std::int64_t>(kGroups);
  const bool need_y = psi.uses_y || eta.uses_y;
  std::vector<double> group_mean(kGroups, 0.0);
  parallel_chunks(kGroups, threads ? threads : default_threads(), [&](std::size_t g) {
    std::mt19937_64 rng = make_stream(seed, g);
    CompensatedSum acc;
    for (std::int64_t i = 0; i < per; ++i) {
      for (;;) {
        const double x = (static_cast<double>(i) + uniform_open(rng)) / static_cast<double>(per);
        const double y = uniform_open(rng);
        OrbitState s = OrbitState::from({x, y});
        bool ok = true;
        for (std::int64_t j = 0; j < k && ok; ++j) ok = need_y ? m.advance(s) : m.advance_x(s.x);
        if (!ok) continue;
        const SquarePoint end = s.point();
        acc.add((psi.eval(end.x, end.y) - mpsi) * (eta.eval(x, y) - meta));
        break;
      }
    }
    group_mean[g] = acc.value() / static_cast<double>(per);
  });
  double mean = 0.0;
  for (double v : group_mean) mean += v;
  mean /= kGroups;
  double var = 0.0;
  for (double v : group_mean) var += (v - mean) * (v - mean);
  var /= (kGroups - 1);
  CorrelationEstimate out;
  out.k = k;
  out.signed_cov = mean;
  out.cor = std::fabs(mean);
  out.se = std::sqrt(var / kGroups);
  return out;
}

namespace {

struct LagMatrix {
  std::vector<std::vector<double>> per_traj;  // [traj][lag index]
  std::int64_t redrawn = 0;
};

LagMatrix lag_products(const IbtMap& m, const Observable& psi, const Observable& eta,
                       std::span<const std::int64_t> lags, std::int64_t n_traj,
                       std::int64_t window, std::uint64_t seed, unsigned threads) {
  if (n_traj < 2) throw InvalidParameter("correlation_profile: n_traj must be >= 2");
  if (window < 1) throw InvalidParameter("correlation_profile: window must be >= 1");
  if (lags.empty()) throw InvalidParameter("correlation_profile: no lags");
  std::int64_t kmax = 0;
  for (std::int64_t k : lags) {
    if (k < 0) throw InvalidParameter("correlation_profile: lags must be >= 0");
    kmax = std::max(kmax, k);
  }
  const double mpsi = integral(psi);
  const double meta = integral(eta);
  LagMatrix out;
  out.per_traj.assign(static_cast<std::size_t>(n_traj), std::vector<double>(lags.size(), 0.0));
  std::vector<std::int64_t> redrawn(static_cast<std::size_t>(n_traj), 0);
  parallel_chunks(static_cast<std::size_t>(n_traj), threads ? threads : default_threads(),
                  [&](std::size_t i) {
                    std::mt19937_64 rng = make_stream(seed, i);
                    std::vector<double> vpsi;
                    std::vector<double> veta;
                    redrawn[i] = sample_orbit(m, psi, eta, window + kmax, rng, vpsi, veta);
                    for (double& v : vpsi) v -= mpsi;
                    for (double& v : veta) v -= meta;
                    for (std::size_t l = 0; l < lags.size(); ++l) {
                      const auto k = static_cast<std::size_t>(lags[l]);
                      double acc = 0.0;
                      for (std::size_t j = 0; j < static_cast<std::size_t>(window); ++j) {
                        acc += veta[j] * vpsi[j + k];
                      }
                      out.per_traj[i][l] = acc / static_cast<double>(window);
                    }
                  });
  for (std::int64_t v : redrawn) out.redrawn += v;
  return out;
}

CorrelationEstimate summarize(const LagMatrix& lm, std::size_t l, std::int64_t k) {
  const auto n = static_cast<double>(lm.per_traj.size());
  CompensatedSum s;
  for (const auto& row : lm.per_traj) s.add(row[l]);
  const double mean = s.value() / n;
  CompensatedSum v;
  for (const auto& row : lm.per_traj) v.add((row[l] - mean) * (row[l] - mean));
  CorrelationEstimate e;
  e.k = k;
  e.signed_cov = mean;
  e.cor = std::fabs(mean);
  e.se = std::sqrt(v.value() / (n - 1.0) / n);
  return e;
}

}  // namespace

std::vector<CorrelationEstimate> correlation_profile(const IbtMap& m, const Observable& psi,
                                                     const Observable& eta,
                                                     std::span<const std::int64_t> lags,
                                                     std::int64_t n_traj, std::int64_t window,
                                                     std::uint64_t seed, unsigned threads) {
  const LagMatrix lm = lag_products(m, psi, eta, lags, n_traj, window, seed, threads);
  std::vector<CorrelationEstimate> out;
  for (std::size_t l = 0; l < lags.size(); ++l) out.push_back(summarize(lm, l, lags[l]));
  return out;
}

GreenKubo green_kubo(const Observable& obs, const IbtMap& m, std::int64_t max_lag,
                     std::int64_t n_traj, std::int64_t window, std::uint64_t seed,
                     unsigned threads) {
  if (max_lag < 1) throw InvalidParameter("green_kubo: max_lag must be >= 1");
  std::vector<std::int64_t> lags(static_cast<std::size_t>(max_lag) + 1);
  for (std::size_t k = 0; k < lags.size(); ++k) lags[k] = static_cast<std::int64_t>(k);
  const LagMatrix lm = lag_products(m, obs, obs, lags, n_traj, window, seed, threads);
  GreenKubo gk;
  std::size_t used = 1;
  gk.terms.push_back(summarize(lm, 0, 0));
  for (std::size_t l = 1; l < lags.size(); ++l) {
    CorrelationEstimate e = summarize(lm, l, lags[l]);
    if (e.se > std::fabs(e.signed_cov)) break;
    gk.terms.push_back(e);
    used = l + 1;
  }
  gk.lags_used = static_cast<std::int64_t>(used) - 1;
  // Per-trajectory truncated sums give the standard error of sigma^2.
  std::vector<double> per(lm.per_traj.size());
  for (std::size_t i = 0; i < per.size(); ++i) {
    double s = lm.per_traj[i][0];
    for (std::size_t l = 1; l < used; ++l) s += 2.0 * lm.per_traj[i][l];
    per[i] = s;
  }
  const auto n = static_cast<double>(per.size());
  CompensatedSum tot;
  for (double v : per) tot.add(v);
  gk.sigma2 = tot.value() / n;
  CompensatedSum var;
  for (double v : per) var.add((v - gk.sigma2) * (v - gk.sigma2));
  gk.sigma2_se = std::sqrt(var.value() / (n - 1.0) / n);
  return gk;
}

std::string to_string(LimitCase c) {
  switch (c) {
    case LimitCase::kClt: return "CLT";
    case LimitCase::kStableOneSided: return "stable_one_sided";
    case LimitCase::kStableTwoSided: return "stable_two_sided";
    case LimitCase::kNonstandardClt: return "nonstandard_CLT";
    case LimitCase::kOutOfScope: return "out_of_scope";
  }
  return "out_of_scope";
}

double LimitPrediction::norm(double n) const {
  const double base = std::pow(n, norming_power);
  return log_correction ? base * std::sqrt(std::log(n)) : base;
}

namespace {

double stable_factor(double p) {
  const double g = boost::math::tgamma(1.0 - p) * std::cos(p * std::numbers::pi / 2.0);
  if (!(g > 0.0)) throw NumericError("predict_limit: Gamma(1-p) cos(p pi/2) is not positive");
  return g;
}

bool finite_variance_side(double alpha, double m, double gamma) {
  const bool zero = std::fabs(m) <= kZeroMoment;
  if (alpha < 1.0) return true;
  if (zero && alpha == 1.0) return true;
  return zero && alpha > 1.0 && alpha < 3.0 && gamma > (alpha - 1.0) / 2.0;
}

}  // namespace

LimitPrediction predict_limit(const Moments& mom, const InducedSystem& sys, double gamma) {
  const CutFunction& cf = sys.factor().cut();
  const double a0 = cf.alpha0();
  const double a1 = cf.alpha1();
  const TailConstants tc = constants_C(mom.M0, mom.M1, sys);
  LimitPrediction lp;
  lp.M0 = mom.M0;
  lp.M1 = mom.M1;
  lp.C0 = tc.C0;
  lp.C1 = tc.C1;
  const bool z0 = std::fabs(mom.M0) <= kZeroMoment;
  const bool z1 = std::fabs(mom.M1) <= kZeroMoment;

  if (finite_variance_side(a0, mom.M0, gamma) && finite_variance_side(a1, mom.M1, gamma)) {
    lp.case_id = LimitCase::kClt;
    lp.norming = "sqrt(n)";
    lp.norming_power = 0.5;
    lp.note = "xi in L2; sigma^2 from Green-Kubo sums (assumes xi is not a coboundary)";
    return lp;
  }

  // One side strictly heavier than the other, or the other in the L2 regime:
  // one-sided stable law.
  const bool fv0 = finite_variance_side(a0, mom.M0, gamma);
  const bool fv1 = finite_variance_side(a1, mom.M1, gamma);
  const bool heavy0 = a0 > 1.0 && !z0 && (a0 > a1 || fv1);
  const bool heavy1 = a1 > 1.0 && !z1 && (a1 > a0 || fv0);
  if (heavy0 || heavy1) {
    const double alpha = heavy0 ? a0 : a1;
    const double m = heavy0 ? mom.M0 : mom.M1;
    const double c = heavy0 ? tc.C0 : tc.C1;
    const double p = 1.0 + 1.0 / alpha;
    lp.case_id = LimitCase::kStableOneSided;
    lp.norming = "n^(alpha/(alpha+1))";
    lp.norming_power = alpha / (alpha + 1.0);
    lp.stable = StableParams{p, c * stable_factor(p), m > 0.0 ? 1.0 : -1.0};
    lp.stable_renewal = StableParams{p, lp.stable->a * sys.leb(), lp.stable->b};
    lp.inferred_by_symmetry = !(heavy0 && m > 0.0);
    if (lp.inferred_by_symmetry) lp.note = "inferred by symmetry";
    return lp;
  }

  if (a0 == a1 && a0 > 1.0 && !z0 && !z1 && (mom.M0 > 0.0) != (mom.M1 > 0.0)) {
    const double p = 1.0 + 1.0 / a0;
    lp.case_id = LimitCase::kStableTwoSided;
    lp.norming = "n^(alpha/(alpha+1))";
    lp.norming_power = a0 / (a0 + 1.0);
    // Right tail carries the constant of the side with positive M.
    const double up = mom.M0 > 0.0 ? tc.C0 : tc.C1;
    const double down = mom.M0 > 0.0 ? tc.C1 : tc.C0;
    lp.stable = StableParams{p, (tc.C0 + tc.C1) * stable_factor(p), (up - down) / (up + down)};
    lp.stable_renewal = StableParams{p, lp.stable->a * sys.leb(), lp.stable->b};
    lp.inferred_by_symmetry = mom.M0 < 0.0;
    if (lp.inferred_by_symmetry) lp.note = "inferred by symmetry";
    return lp;
  }

  if (a0 == 1.0 && a1 == 1.0 && !z0 && !z1) {
    lp.case_id = LimitCase::kNonstandardClt;
    lp.norming = "sqrt(n log n)";
    lp.norming_power = 0.5;
    lp.log_correction = true;
    lp.variance = tc.C0 + tc.C1;
    lp.variance_renewal = (tc.C0 + tc.C1) * sys.leb();
    return lp;
  }

  lp.case_id = LimitCase::kOutOfScope;
  lp.norming = "none";
  lp.note = "hypotheses of cases i-iv not met";
  return lp;
}

LimitPrediction predict_limit(const Observable& obs, const InducedSystem& sys) {
  if (!obs.mean_zero) throw InvalidParameter("predict_limit: observable must have mean zero");
  return predict_limit(moments_M(obs, sys), sys, obs.gamma);
}

EnsembleResult birkhoff_ensemble(const Observable& obs, const IbtMap& m, std::int64_t n,
                                 std::int64_t n_traj, std::uint64_t seed, double norm,
                                 unsigned threads) {
  if (n < 1 || n_traj < 1) throw InvalidParameter("birkhoff_ensemble: n and n_traj must be >= 1");
  if (!(norm > 0.0)) throw InvalidParameter("birkhoff_ensemble: norm must be > 0");
  EnsembleResult res;
  res.sums.assign(static_cast<std::size_t>(n_traj), 0.0);
  std::vector<std::int64_t> redrawn(static_cast<std::size_t>(n_traj), 0);
  const bool need_y = obs.uses_y;
  parallel_chunks(static_cast<std::size_t>(n_traj), threads ? threads : default_threads(),
                  [&](std::size_t i) {
                    std::mt19937_64 rng = make_stream(seed, i);
                    for (;;) {
                      OrbitState s = OrbitState::from({uniform_open(rng), uniform_open(rng)});
                      double sum = 0.0;
                      bool ok = true;
                      if (need_y) {
                        for (std::int64_t k = 0; k < n; ++k) {
                          const SquarePoint pt = s.point();
                          sum += obs.eval(pt.x, pt.y);
                          if (!m.advance(s)) {
                            ok = false;
                            break;
                          }
                        }
                      } else {
                        FoldedX x = s.x;
                        for (std::int64_t k = 0; k < n; ++k) {
                          sum += obs.eval(x.value(), 0.0);
                          if (!m.advance_x(x)) {
                            ok = false;
                            break;
                          }
                        }
                      }
                      if (ok) {
                        res.sums[i] = sum / norm;
                        return;
                      }
                      ++redrawn[i];
                    }
                  });
  for (std::int64_t v : redrawn) res.redrawn += v;
  return res;
}

std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> t_grid) {
  if (samples.empty()) throw InvalidParameter("empirical_cf: samples must be nonempty");
  std::vector<std::complex<double>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    CompensatedSum re;
    CompensatedSum im;
    for (double s : samples) {
      re.add(std::cos(t * s));
      im.add(std::sin(t * s));
    }
    const auto n = static_cast<double>(samples.size());
    out.emplace_back(re.value() / n, im.value() / n);
  }
  return out;
}

}  // namespace ibt
