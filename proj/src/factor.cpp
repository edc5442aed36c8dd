#include "ibt/factor.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ibt/error.hpp"

namespace ibt {

namespace {

constexpr int kPanels = 60;

// Cumulative integral of `integrand` from 0, tabulated at dyadic points so
// any t can be reached with one short Gauss-Legendre rule.
class DyadicPrimitive {
 public:
  DyadicPrimitive(RealFn integrand, double top, int panels, double leading_power)
      : integrand_(std::move(integrand)) {
    const int top_exp = std::ilogb(top) + 1;
    const int bottom_exp = top_exp - panels - 2;
    const double bottom = std::ldexp(1.0, bottom_exp);
    // Power-law head: integrand ~ k t^s on (0, bottom].
    double acc = integrand_(bottom) * bottom / (leading_power + 1.0);
    cum_[bottom_exp] = acc;
    for (int e = bottom_exp; e < top_exp; ++e) {
      acc += gauss_legendre(integrand_, std::ldexp(1.0, e), std::ldexp(1.0, e + 1));
      cum_[e + 1] = acc;
    }
    bottom_exp_ = bottom_exp;
    head_power_ = leading_power;
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    int e = std::ilogb(t);
    if (e < bottom_exp_) {
      const double b = std::ldexp(1.0, bottom_exp_);
      return cum_.at(bottom_exp_) * std::pow(t / b, head_power_ + 1.0);
    }
    const double lo = std::ldexp(1.0, e);
    return cum_.at(e) + (t > lo ? gauss_legendre(integrand_, lo, t) : 0.0);
  }

 private:
  RealFn integrand_;
  std::map<int, double> cum_;
  int bottom_exp_ = 0;
  double head_power_ = 0.0;
};

}  // namespace

FactorMap::FactorMap(CutFunction cf, double inverse_tol)
    : cf_(std::move(cf)), inverse_tol_(inverse_tol) {
  const double al0 = cf_.alpha0();
  const double al1 = cf_.alpha1();
  const double k0 = cf_.c0();
  const double k1 = cf_.c1();

  RealFn omp = [this](double t) { return cf_.one_minus_phi(t); };
  RealFn phr = [this](double s) { return cf_.phi_reflected(s); };

  q_[0] = DyadicChebTable(omp, 0.5, kPanels, al0);
  q_[1] = DyadicChebTable(phr, 0.5, kPanels, al1);

  const DyadicPrimitive d0_exact(omp, 0.5, kPanels, al0);
  const DyadicPrimitive p1_exact(phr, 0.5, kPanels, al1);
  d0_ = DyadicChebTable([&](double t) { return d0_exact(t); }, 0.5, kPanels, al0 + 1.0);
  p1_ = DyadicChebTable([&](double s) { return p1_exact(s); }, 0.5, kPanels, al1 + 1.0);

  const double d_half = d0_exact(0.5);
  const double p_half = p1_exact(0.5);
  a_ = (0.5 - d_half) + p_half;
  one_minus_a_ = d_half + (0.5 - p_half);

  RealFn phi = [this](double x) { return cf_.phi(x); };
  a_quad_ = integrate_tanh_sinh(phi, 0.0, 0.5, 5e-13) + integrate_tanh_sinh(phi, 0.5, 1.0, 5e-13);
  if (std::fabs(a_quad_ - a_) > 1e-11) {
    throw NumericError("build_factor: area under phi disagrees between quadratures");
  }

  const double a = a_;
  const double oma = one_minus_a_;
  // D0, P1, Q0, Q1 in the residuals below come from the fresh tables.
  auto D0 = [this](double t) { return d0_(t); };
  auto P1 = [this](double s) { return p1_(s); };
  auto Q0 = [this](double t) { return q_[0](t); };
  auto Q1 = [this](double s) { return q_[1](s); };

  // f(x) - x on the left branch near 0.
  zone_[kL0] = DyadicChebTable(
      [&](double x) {
        auto fdf = [&](double e) -> std::pair<double, double> {
          const double t = x + e;
          if (t <= 0.5) return {e - D0(t), 1.0 - Q0(t)};
          return {a - P1(1.0 - t) - x, Q1(1.0 - t)};
        };
        return solve_increasing(fdf, D0(x), 0.0, 1.0 - x);
      },
      0.5 * a, kPanels, al0 + 1.0);

  // 1 - f(A - d) on the left branch near the cut.
  zone_[kLA] = DyadicChebTable(
      [&](double d) {
        auto fdf = [&](double s) -> std::pair<double, double> {
          if (s <= 0.5) return {P1(s) - d, Q1(s)};
          const double t = 1.0 - s;
          return {a - t + D0(t) - d, 1.0 - Q0(t)};
        };
        const double guess = std::pow((al1 + 1.0) * d / k1, 1.0 / (al1 + 1.0));
        return solve_increasing(fdf, std::min(guess, 1.0), 0.0, 1.0);
      },
      0.5 * a, kPanels, 1.0 / (al1 + 1.0));

  // f(A + d) on the right branch near the cut.
  zone_[kRA] = DyadicChebTable(
      [&](double d) {
        auto fdf = [&](double t) -> std::pair<double, double> {
          if (t <= 0.5) return {D0(t) - d, Q0(t)};
          const double s = 1.0 - t;
          return {oma - s + P1(s) - d, 1.0 - Q1(s)};
        };
        const double guess = std::pow((al0 + 1.0) * d / k0, 1.0 / (al0 + 1.0));
        return solve_increasing(fdf, std::min(guess, 1.0), 0.0, 1.0);
      },
      0.5 * oma, kPanels, 1.0 / (al0 + 1.0));

  // (1 - f(1 - e)) - e on the right branch near 1.
  zone_[kR1] = DyadicChebTable(
      [&](double e) {
        auto fdf = [&](double g) -> std::pair<double, double> {
          const double s = e + g;
          if (s <= 0.5) return {g - P1(s), 1.0 - Q1(s)};
          const double t = 1.0 - s;
          return {oma - D0(t) - e, Q0(t)};
        };
        return solve_increasing(fdf, P1(e), 0.0, 1.0 - e);
      },
      0.5 * oma, kPanels, al1 + 1.0);
}

double FactorMap::w0_gap(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("w0_gap: x outside [0,1]");
  return x <= 0.5 ? d0_(x) : x - a_ + p1_(1.0 - x);
}

double FactorMap::w0_top_gap(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("w0_top_gap: s outside [0,1]");
  if (s <= 0.5) return p1_(s);
  const double t = 1.0 - s;
  return a_ - t + d0_(t);
}

double FactorMap::w1_top_gap(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("w1_top_gap: s outside [0,1]");
  if (s <= 0.5) return s - p1_(s);
  return one_minus_a_ - d0_(1.0 - s);
}

double FactorMap::w0(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("w0: x outside [0,1]");
  return x <= 0.5 ? x - d0_(x) : a_ - p1_(1.0 - x);
}

double FactorMap::w1(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("w1: x outside [0,1]");
  if (x <= 0.5) return a_ + d0_(x);
  const double s = 1.0 - x;
  return 1.0 - (s - p1_(s));
}

double FactorMap::f(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("f: x outside [0,1]");
  if (x == a_) return 0.0;
  const FactorStep s = step(FoldedX::from(x));
  if (!s.near_cut) return s.next.value();
  // Inside the singular band the one-sided limits are 1 (left) and 0 (right).
  return x < a_ ? 1.0 - zone_[kLA](a_ - x) : zone_[kRA](x - a_);
}

double FactorMap::Df(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("Df: x outside [0,1]");
  const FactorStep s = step(FoldedX::from(x));
  if (s.near_cut) throw NearCutError("Df: x within 1e-12 of the cut A", 0);
  return s.left ? 1.0 / s.phi : 1.0 / s.one_minus_phi;
}

double FactorMap::f_reference(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("f_reference: x outside [0,1]");
  const bool left = x < a_;
  auto branch = [&](double t) { return left ? w0(t) : w1(t); };
  // Bracketed bisection down to width 1e-8, then Newton with Dw = phi or 1 - phi.
  double t = bisect_increasing(branch, x, 0.0, 1.0, 1e-8);
  for (int it = 0; it < 8; ++it) {
    const double phi = cf_.phi(std::clamp(t, 0.0, 1.0));
    const double slope = left ? phi : 1.0 - phi;
    if (slope <= 0.0) break;
    const double step = (branch(t) - x) / slope;
    const double next = std::clamp(t - step, std::max(0.0, t - 1e-8), std::min(1.0, t + 1e-8));
    if (std::fabs(next - t) <= inverse_tol_) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

FactorMap build_factor(const CutFunction& cf) { return FactorMap(cf); }

}  // namespace ibt
