#pragma once

// The expanding factor f of an intermittent baker's transformation.
//
//   w0(x) = int_0^x phi,        w1(x) = A + int_0^x (1 - phi),   A = int_0^1 phi
//   f = w0^{-1} on [0,A),  f = w1^{-1} on [A,1]
//
// All branch quantities are tabulated once at build time on dyadic
// Chebyshev panels, so an evaluation of f costs two short polynomial evaluations.
// Points are carried internally in a folded form (distance to the nearer
// fixed point 0 or 1) which keeps orbits near x = 1 as accurate as orbits
// near x = 0.

#include <array>

#include "ibt/icf.hpp"
#include "ibt/numerics.hpp"

namespace ibt {

/// Points closer than this to the cut x = A are treated as singular.
inline constexpr double kCutTolerance = 1e-12;

/// x encoded as v (hi == false) or 1 - v (hi == true), with v in [0, 1/2].
struct FoldedX {
  double v = 0.0;
  bool hi = false;

  [[nodiscard]] static FoldedX from(double x) noexcept {
    return x <= 0.5 ? FoldedX{x, false} : FoldedX{1.0 - x, true};
  }
  [[nodiscard]] double value() const noexcept { return hi ? 1.0 - v : v; }
};

/// One application of f together with the cut-function values the fibre
/// map needs: phi(f(x)) and 1 - phi(f(x)), both with relative accuracy.
struct FactorStep {
  FoldedX next;
  double phi = 1.0;
  double one_minus_phi = 0.0;
  bool left = true;       // x < A
  bool near_cut = false;  // |x - A| < kCutTolerance; other fields invalid
};

class FactorMap {
 public:
  explicit FactorMap(CutFunction cf, double inverse_tol = 1e-14);

  [[nodiscard]] const CutFunction& cut() const noexcept { return cf_; }
  [[nodiscard]] double A() const noexcept { return a_; }
  /// 1 - A, computed without cancellation.
  [[nodiscard]] double one_minus_A() const noexcept { return one_minus_a_; }
  [[nodiscard]] double inverse_tol() const noexcept { return inverse_tol_; }
  /// Area under phi from independent adaptive quadrature (build check).
  [[nodiscard]] double A_quadrature() const noexcept { return a_quad_; }

  [[nodiscard]] double w0(double x) const;
  [[nodiscard]] double w1(double x) const;
  /// x - w0(x) = int_0^x (1 - phi), accurate for small x.
  [[nodiscard]] double w0_gap(double x) const;
  /// A - w0(1 - s) = int_0^s phi(1 - u) du, accurate for small s.
  [[nodiscard]] double w0_top_gap(double s) const;
  /// 1 - w1(1 - s), accurate for small s.
  [[nodiscard]] double w1_top_gap(double s) const;

  /// phi at t from the tables, chosen for relative accuracy.
  [[nodiscard]] double phi_fast(double t) const noexcept {
    return t <= 0.5 ? 1.0 - q_[0](t) : q_[1](1.0 - t);
  }

  [[nodiscard]] double f(double x) const;
  [[nodiscard]] double Df(double x) const;
  /// f by bracketed bisection on the w-branches followed by Newton polish;
  /// slower reference path used to audit the tabulated inverse.
  [[nodiscard]] double f_reference(double x) const;

  /// Hot-path step in folded coordinates.  Never throws.  With
  /// kWithPhi == false the phi fields are left at their defaults.
  ///
  /// Each point falls in one of four zones (left branch near 0 or near the
  /// cut, right branch near the cut or near 1); the zone picks the table and
  /// its argument without data-dependent branches, since chaotic orbits
  /// defeat branch prediction.
  template <bool kWithPhi = true>
  [[nodiscard]] FactorStep step(FoldedX x) const noexcept {
    FactorStep out;
    const double v = x.v;
    bool left;
    double d;
    double far;  // distance to the fixed point of the current branch
    if (!x.hi) {
      left = v < a_;
      d = left ? a_ - v : v - a_;
      far = left ? v : 1.0 - v;
    } else {
      left = !(v < one_minus_a_);
      d = left ? v - one_minus_a_ : one_minus_a_ - v;
      far = left ? 1.0 - v : v;
    }
    if (d < kCutTolerance) [[unlikely]] {
      out.near_cut = true;
      return out;
    }
    const bool inner = left ? d <= 0.5 * a_ : d <= 0.5 * one_minus_a_;
    const int zone = (left ? 0 : 2) + (inner ? 1 : 0);
    const double arg = inner ? d : far;
    const double r = (inner ? 0.0 : arg) + zone_[zone](arg);
    // r is measured from 0 (lo) for zones L0 and RA, from 1 (hi) otherwise.
    const bool base_hi = left == inner;
    const bool flip = r > 0.5;
    out.next = {flip ? 1.0 - r : r, base_hi != flip};
    out.left = left;
    if constexpr (kWithPhi) {
      const double q = q_[out.next.hi ? 1 : 0](out.next.v);
      out.phi = out.next.hi ? q : 1.0 - q;
      out.one_minus_phi = out.next.hi ? 1.0 - q : q;
    }
    return out;
  }

 private:
  enum Zone { kL0 = 0, kLA = 1, kR1 = 2, kRA = 3 };

  CutFunction cf_;
  double inverse_tol_;
  double a_ = 0.5;
  double one_minus_a_ = 0.5;
  double a_quad_ = 0.5;
  // q_[0](t) = 1 - phi(t), q_[1](s) = phi(1 - s), both on (0, 1/2].
  std::array<DyadicChebTable, 2> q_;
  DyadicChebTable d0_;  // int_0^t (1 - phi)
  DyadicChebTable p1_;  // int_0^s phi(1 - u) du
  // zone_[kL0](x) = f(x) - x              x in (0, A/2]
  // zone_[kLA](d) = 1 - f(A - d)          d in (0, A/2]
  // zone_[kR1](e) = (1 - f(1 - e)) - e    e in (0, (1-A)/2]
  // zone_[kRA](d) = f(A + d)              d in (0, (1-A)/2]
  std::array<DyadicChebTable, 4> zone_;
};

/// Builds the factor map of a cut function.
FactorMap build_factor(const CutFunction& cf);

}  // namespace ibt
