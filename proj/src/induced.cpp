#include "ibt/induced.hpp"

#include <algorithm>
#include <cmath>

#include "ibt/error.hpp"
#include "ibt/numerics.hpp"

namespace ibt {

PeriodTwoOrbit find_period_two(const FactorMap& fm) {
  const double a = fm.A();
  auto g = [&](double x) { return fm.w0(fm.w1(x)) - x; };
  double lo = 0.0;
  double hi = a;
  if (!(g(lo) > 0.0 && g(hi) < 0.0)) {
    throw NumericError("find_period_two: w0(w1(x)) - x does not change sign on (0, A)");
  }
  // Bisect down to adjacent doubles, well past the 1e-13 target.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  PeriodTwoOrbit o;
  o.p = 0.5 * (lo + hi);
  o.q = fm.w1(o.p);
  o.residual_fp = std::fabs(fm.f(o.p) - o.q);
  o.residual_fq = std::fabs(fm.f(o.q) - o.p);
  if (o.residual_fp > 1e-10 || o.residual_fq > 1e-10) {
    throw NumericError("find_period_two: residual above 1e-10");
  }
  return o;
}

ReturnCells build_cells(const FactorMap& fm, const PeriodTwoOrbit& orbit,
                        std::int64_t n_max) {
  if (n_max < 2) throw InvalidParameter("build_cells: n_max must be at least 2");
  ReturnCells c;
  c.A = fm.A();
  c.leb = orbit.leb();
  c.n_requested = n_max;
  const auto size = static_cast<std::size_t>(n_max) + 1;
  c.p_seq.resize(size);
  c.q_gap.resize(size);
  c.p_off.resize(size);
  c.q_off.resize(size);
  c.p_seq[0] = orbit.p;
  c.q_gap[0] = fm.w1_top_gap(1.0 - orbit.p);
  c.p_off[0] = 0.0;
  c.q_off[0] = 0.0;

  std::int64_t last = n_max;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double pp = c.p_seq[n - 1];
    const double qg = c.q_gap[n - 1];
    const double po = fm.w0_gap(pp);
    const double qo = fm.w0_top_gap(qg);
    const double pn = pp - po;
    const double qn = fm.w1_top_gap(qg);
    const bool ok = po > 0.0 && qo > 0.0 && pn > 0.0 && pn < pp && qn > 0.0 && qn < qg &&
                    (n == 1 || (po < c.p_off[n - 1] && qo < c.q_off[n - 1]));
    if (!ok) {
      last = n - 1;
      break;
    }
    c.p_off[n] = po;
    c.q_off[n] = qo;
    c.p_seq[n] = pn;
    c.q_gap[n] = qn;
  }
  if (last < 2) throw NumericError("build_cells: orbit preimages not monotone");
  c.n_max = last;
  const auto keep = static_cast<std::size_t>(last) + 1;
  c.p_seq.resize(keep);
  c.q_gap.resize(keep);
  c.p_off.resize(keep);
  c.q_off.resize(keep);
  return c;
}

InducedSystem::InducedSystem(const IbtMap& m, std::int64_t n_cells, std::int64_t r_max)
    : m_(m), orbit_(find_period_two(m.factor())),
      cells_(build_cells(m.factor(), orbit_, n_cells)), r_max_(r_max) {
  if (r_max < 2) throw InvalidParameter("InducedSystem: r_max must be at least 2");
}

std::int64_t InducedSystem::lookup_cell(double x) const noexcept {
  const double a = cells_.A;
  const bool right = x > a;
  const double delta = right ? x - a : a - x;
  const std::vector<double>& off = right ? cells_.p_off : cells_.q_off;
  // off[2..n_max] is strictly decreasing; the cell is the first m with
  // off[m] <= delta (closed end of the cell sits on that boundary).
  const auto first = off.begin() + 2;
  const auto it = std::partition_point(first, off.end(),
                                       [delta](double b) { return b > delta; });
  if (it == off.end()) return 0;
  return static_cast<std::int64_t>(it - off.begin());
}

namespace {

void check_base_point(const InducedSystem& sys, double x) {
  if (!sys.in_base(x)) throw DomainError("return_time: x outside [p, q]");
  if (std::fabs(x - sys.factor().A()) < kCutTolerance) {
    throw NearCutError("return_time: x within 1e-12 of the cut A", 0);
  }
}

std::int64_t iterate_until_return(const InducedSystem& sys, double x) {
  const IbtMap& m = sys.map();
  FoldedX fx = FoldedX::from(x);
  for (std::int64_t k = 1; k <= sys.r_max(); ++k) {
    if (!m.advance_x(fx)) {
      throw NearCutError("return_time: orbit hit the cut at iterate " + std::to_string(k - 1),
                         k - 1);
    }
    if (sys.in_base(fx)) return k;
  }
  throw TailOverflow("return_time: no return within r_max", sys.r_max());
}

}  // namespace

std::int64_t return_time(const InducedSystem& sys, double x) {
  check_base_point(sys, x);
  if (x == sys.p() || x == sys.q()) return 1;
  const std::int64_t cell = sys.lookup_cell(x);
  if (cell > 0) {
    if (cell > sys.r_max()) throw TailOverflow("return_time: no return within r_max", sys.r_max());
    return cell;
  }
  return iterate_until_return(sys, x);
}

std::int64_t return_time_bruteforce(const InducedSystem& sys, double x) {
  check_base_point(sys, x);
  return iterate_until_return(sys, x);
}

InducedStep induced_step(const InducedSystem& sys, SquarePoint pt) {
  if (!(pt.y >= 0.0 && pt.y <= 1.0)) throw DomainError("induced_step: y outside [0,1]");
  const std::int64_t r = return_time(sys, pt.x);
  OrbitState s = OrbitState::from(pt);
  const IbtMap& m = sys.map();
  for (std::int64_t k = 0; k < r; ++k) {
    if (!m.advance(s)) {
      throw NearCutError("induced_step: orbit hit the cut at iterate " + std::to_string(k), k);
    }
  }
  SquarePoint out = s.point();
  out.x = std::clamp(out.x, sys.p(), sys.q());
  return {out, r};
}

double cell_measure(const InducedSystem& sys, std::int64_t n) {
  const ReturnCells& c = sys.cells();
  if (n < 2 || n > c.n_max) throw DomainError("cell_measure: n outside the tabulated range");
  const double dp = c.p_off[n - 1] - c.p_off[n];
  const double dq = c.q_off[n - 1] - c.q_off[n];
  return (dp + dq) / c.leb;
}

double tail_measure(const InducedSystem& sys, std::int64_t n) {
  const ReturnCells& c = sys.cells();
  if (n < 0 || n > c.n_max) throw DomainError("tail_measure: n outside the tabulated range");
  if (n <= 1) return 1.0;
  return (c.p_off[n] + c.q_off[n]) / c.leb;
}

namespace {

// Sum_{n > N} b_n for b_n ~ C n^{-beta}, anchored at b_N (midpoint rule).
double power_tail(double b_n, double n, double beta) {
  return b_n * std::pow(n, beta) * std::pow(n + 0.5, 1.0 - beta) / (beta - 1.0);
}

}  // namespace

double mean_return_time(const InducedSystem& sys) {
  const ReturnCells& c = sys.cells();
  const CutFunction& cf = sys.factor().cut();
  // E r = Sum_{n >= 0} lambda[r > n].
  CompensatedSum sum;
  for (std::int64_t n = c.n_max; n >= 2; --n) sum.add(c.p_off[n] + c.q_off[n]);
  const auto big_n = static_cast<double>(c.n_max);
  sum.add(power_tail(c.p_off[c.n_max], big_n, 1.0 + 1.0 / cf.alpha0()));
  sum.add(power_tail(c.q_off[c.n_max], big_n, 1.0 + 1.0 / cf.alpha1()));
  return 2.0 + sum.value() / c.leb;
}

OrbitAsymptoticsReport check_orbit_asymptotics(const InducedSystem& sys,
                                               std::int64_t n_max) {
  if (n_max < 1000) throw InvalidParameter("check_orbit_asymptotics: n_max must be >= 1000");
  const FactorMap& fm = sys.factor();
  const CutFunction& cf = fm.cut();
  ReturnCells local;
  const ReturnCells* table = &sys.cells();
  if (table->n_max <= n_max) {
    local = build_cells(fm, sys.orbit(), n_max + 1);
    table = &local;
  }
  const ReturnCells& c = *table;
  if (c.n_max <= n_max) {
    throw NumericError("check_orbit_asymptotics: preimage table truncated before n_max");
  }

  const double a0 = cf.alpha0();
  const double a1 = cf.alpha1();
  const double k0 = std::pow((a0 + 1.0) / (cf.c0() * a0), 1.0 / a0);
  const double k1 = std::pow((a1 + 1.0) / (cf.c1() * a1), 1.0 / a1);
  const double inc0 = cf.c0() / a0 * std::pow((a0 + 1.0) / (cf.c0() * a0), 1.0 + 1.0 / a0);
  const double inc1 = cf.c1() / a1 * std::pow((a1 + 1.0) / (cf.c1() * a1), 1.0 + 1.0 / a1);

  struct Spec {
    const char* name;
    double constant;
    double exponent;
    double (*measure)(const ReturnCells&, std::int64_t);
  };
  const Spec specs[] = {
      {"p_n", k0, -1.0 / a0,
       [](const ReturnCells& r, std::int64_t n) { return r.p_seq[n]; }},
      {"1-q_n", k1, -1.0 / a1,
       [](const ReturnCells& r, std::int64_t n) { return r.q_gap[n]; }},
      {"p_n-p_{n+1}", k0 / a0, -1.0 - 1.0 / a0,
       [](const ReturnCells& r, std::int64_t n) { return r.p_seq[n] - r.p_seq[n + 1]; }},
      {"q_{n+1}-q_n", k1 / a1, -1.0 - 1.0 / a1,
       [](const ReturnCells& r, std::int64_t n) { return r.q_gap[n] - r.q_gap[n + 1]; }},
      {"p°_n-A", k0 / a0, -1.0 - 1.0 / a0,
       [](const ReturnCells& r, std::int64_t n) { return r.p_off[n]; }},
      {"A-q°_n", k1 / a1, -1.0 - 1.0 / a1,
       [](const ReturnCells& r, std::int64_t n) { return r.q_off[n]; }},
      {"p°_n-p°_{n+1}", inc0, -2.0 - 1.0 / a0,
       [](const ReturnCells& r, std::int64_t n) { return r.p_off[n] - r.p_off[n + 1]; }},
      {"q°_{n+1}-q°_n", inc1, -2.0 - 1.0 / a1,
       [](const ReturnCells& r, std::int64_t n) { return r.q_off[n] - r.q_off[n + 1]; }},
  };

  std::vector<std::int64_t> grid;
  for (std::int64_t n = 10; n < n_max; n *= 10) grid.push_back(n);
  grid.push_back(n_max);

  OrbitAsymptoticsReport rep;
  rep.n_max = n_max;
  for (const Spec& s : specs) {
    AsymptoticCheck chk;
    chk.name = s.name;
    chk.predicted_constant = s.constant;
    chk.exponent = s.exponent;
    for (std::int64_t n : grid) {
      const double pred = s.constant * std::pow(static_cast<double>(n), s.exponent);
      chk.trace.emplace_back(n, s.measure(c, n) / pred);
    }
    chk.ratio = chk.trace.back().second;
    rep.checks.push_back(std::move(chk));
  }
  return rep;
}

}  // namespace ibt
