#pragma once

// The intermittent baker's transformation B(x,y) = (f(x), g_x(y)) with
//   g_x(y) = phi(f(x)) y                           for x < A
//   g_x(y) = (1 - phi(f(x))) y + phi(f(x))         for x > A.

#include <cstdint>
#include <memory>
#include <vector>

#include "ibt/factor.hpp"

namespace ibt {

struct SquarePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Orbit state with the x coordinate kept in folded form.
struct OrbitState {
  FoldedX x;
  double y = 0.0;

  [[nodiscard]] static OrbitState from(SquarePoint p) noexcept {
    return {FoldedX::from(p.x), p.y};
  }
  [[nodiscard]] SquarePoint point() const noexcept { return {x.value(), y}; }
};

class IbtMap {
 public:
  explicit IbtMap(std::shared_ptr<const FactorMap> fm);
  explicit IbtMap(const CutFunction& cf);

  [[nodiscard]] const FactorMap& factor() const noexcept { return *fm_; }
  [[nodiscard]] std::shared_ptr<const FactorMap> factor_ptr() const noexcept {
    return fm_;
  }

  /// Advances the state in place; returns false (state untouched) when the
  /// point sits within kCutTolerance of the cut.
  bool advance(OrbitState& s) const noexcept {
    const FactorStep st = fm_->step(s.x);
    if (st.near_cut) return false;
    s.y = st.left ? st.phi * s.y : 1.0 - (1.0 - s.y) * st.one_minus_phi;
    s.x = st.next;
    return true;
  }

  /// Factor-only advance for observables that ignore y.
  bool advance_x(FoldedX& x) const noexcept {
    const FactorStep st = fm_->step<false>(x);
    if (st.near_cut) return false;
    x = st.next;
    return true;
  }

 private:
  std::shared_ptr<const FactorMap> fm_;
};

/// B(pt).  Throws NearCutError (index 0) when pt.x is within 1e-12 of A.
SquarePoint step(const IbtMap& m, SquarePoint pt);

/// Trajectory of length n+1 starting at pt.  A near-cut hit at iterate k
/// raises NearCutError carrying k.
std::vector<SquarePoint> iterate(const IbtMap& m, SquarePoint pt, std::int64_t n);

/// Df(x) * d/dy g_x(y), the two factors taken from independent code paths.
double jacobian_det(const IbtMap& m, SquarePoint pt);

/// Fibre map g_x(y) evaluated directly from the cut function.
double fiber(const IbtMap& m, double x, double y);

}  // namespace ibt
