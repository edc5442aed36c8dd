#pragma once

// First returns to the base Lambda = [p,q] x [0,1], where {p,q} is the
// period-2 orbit of the factor.  Return-time cells are bounded by the
// preimages p°_n = w1(p_{n-1}) and q°_n = w0(q_{n-1}) of the orbit; they
// accumulate on the cut A from both sides:
//
//   [r = n+2] = (q°_{n+1}, q°_{n+2}]  U  [p°_{n+2}, p°_{n+1})
//
// Near A the boundaries are stored as offsets from A and near 0/1 the
// orbit points as distances to the fixed point, so deep cells keep full
// relative precision.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ibt/baker.hpp"

namespace ibt {

struct PeriodTwoOrbit {
  double p = 0.0;
  double q = 0.0;
  double residual_fp = 0.0;  // |f(p) - q|
  double residual_fq = 0.0;  // |f(q) - p|

  [[nodiscard]] double leb() const noexcept { return q - p; }
};

/// Solves p = w0(w1(p)) on (0, A) by bisection to 1e-13 and sets q = w1(p).
PeriodTwoOrbit find_period_two(const FactorMap& fm);

struct ReturnCells {
  double A = 0.5;
  double leb = 0.0;
  std::int64_t n_max = 0;  // effective depth after any truncation
  std::int64_t n_requested = 0;
  std::vector<double> p_seq;  // p_n,        n = 0..n_max
  std::vector<double> q_gap;  // 1 - q_n,    n = 0..n_max
  std::vector<double> p_off;  // p°_n - A,   n = 1..n_max (index 0 unused)
  std::vector<double> q_off;  // A - q°_n,   n = 1..n_max (index 0 unused)

  [[nodiscard]] double q_seq(std::int64_t n) const { return 1.0 - q_gap.at(n); }
  [[nodiscard]] double p_int(std::int64_t n) const { return A + p_off.at(n); }
  [[nodiscard]] double q_int(std::int64_t n) const { return A - q_off.at(n); }
};

/// Tabulates the orbit preimages by forward recursion.  If a sequence stops
/// being strictly monotone (underflow), all tables are cut to the last good
/// index and n_max records the effective depth.
ReturnCells build_cells(const FactorMap& fm, const PeriodTwoOrbit& orbit,
                        std::int64_t n_max);

class InducedSystem {
 public:
  static constexpr std::int64_t kDefaultCells = 1'000'000;
  static constexpr std::int64_t kDefaultRMax = 1'000'000;

  explicit InducedSystem(const IbtMap& m, std::int64_t n_cells = kDefaultCells,
                         std::int64_t r_max = kDefaultRMax);

  [[nodiscard]] const IbtMap& map() const noexcept { return m_; }
  [[nodiscard]] const FactorMap& factor() const noexcept { return m_.factor(); }
  [[nodiscard]] const PeriodTwoOrbit& orbit() const noexcept { return orbit_; }
  [[nodiscard]] const ReturnCells& cells() const noexcept { return cells_; }
  [[nodiscard]] std::int64_t r_max() const noexcept { return r_max_; }
  [[nodiscard]] double p() const noexcept { return orbit_.p; }
  [[nodiscard]] double q() const noexcept { return orbit_.q; }
  [[nodiscard]] double leb() const noexcept { return orbit_.leb(); }

  [[nodiscard]] bool in_base(double x) const noexcept {
    return x >= orbit_.p && x <= orbit_.q;
  }
  [[nodiscard]] bool in_base(FoldedX x) const noexcept { return in_base(x.value()); }

  /// Cell lookup; 0 when x lies deeper than the table (caller iterates).
  [[nodiscard]] std::int64_t lookup_cell(double x) const noexcept;

 private:
  IbtMap m_;
  PeriodTwoOrbit orbit_;
  ReturnCells cells_;
  std::int64_t r_max_;
};

/// First n >= 1 with f^n(x) in [p,q].  Interior points return at least 2;
/// the orbit points p and q themselves return after one step.  Throws
/// NearCutError if x is within 1e-12 of A and TailOverflow past r_max.
std::int64_t return_time(const InducedSystem& sys, double x);

/// Same quantity by plain iteration of f (oracle for the cell lookup).
std::int64_t return_time_bruteforce(const InducedSystem& sys, double x);

struct InducedStep {
  SquarePoint point;
  std::int64_t r = 0;
};

/// T(pt) = B^r(pt) with r the return time.  The image is clamped into
/// [p,q] to absorb the last-bit rounding of the final step.
InducedStep induced_step(const InducedSystem& sys, SquarePoint pt);

/// lambda[r = n] for 2 <= n <= n_max, lambda normalized Lebesgue on Lambda.
double cell_measure(const InducedSystem& sys, std::int64_t n);

/// lambda[r > n] for 0 <= n <= n_max.
double tail_measure(const InducedSystem& sys, std::int64_t n);

/// Sum_n n lambda[r = n] from the table plus a power-law tail estimate for
/// the cells beyond n_max.  Kac's lemma predicts 1/Leb(Lambda).
double mean_return_time(const InducedSystem& sys);

struct AsymptoticCheck {
  std::string name;
  double predicted_constant = 0.0;
  double exponent = 0.0;  // quantity ~ constant * n^exponent
  double ratio = 0.0;     // measured / predicted at n_max
  std::vector<std::pair<std::int64_t, double>> trace;  // (n, ratio)
};

struct OrbitAsymptoticsReport {
  std::int64_t n_max = 0;
  std::vector<AsymptoticCheck> checks;
};

/// Ratios of the eight orbit-preimage quantities to their leading terms,
/// with a trace at n = 10, 100, ..., n_max.  The interior quantities use
/// the contact data of the side they approach (alpha0, c0 for p°, alpha1,
/// c1 for q°).
OrbitAsymptoticsReport check_orbit_asymptotics(const InducedSystem& sys,
                                               std::int64_t n_max);

}  // namespace ibt
