#pragma once

// Observables on the square, the induced observable xi, the constants
// M0, M1, C0, C1 of the limit theorem, correlation estimates and
// ensembles of Birkhoff sums.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibt/induced.hpp"
#include "ibt/stable.hpp"

namespace ibt {

struct Observable {
  std::string kind;
  std::vector<double> params;
  std::function<double(double, double)> eval;
  double gamma = 1.0;  // declared Hoelder exponent
  bool mean_zero = false;
  bool uses_y = true;  // false lets ensembles skip the fibre update
  // Interior points where X may have kinks; quadrature splits there.
  std::vector<double> breaks_x;
  std::vector<double> breaks_y;

  double operator()(double x, double y) const { return eval(x, y); }
};

/// X = 1/2 - x.
Observable linear_x(double scale = 1.0);
/// X = y - 1/2.
Observable linear_y(double scale = 1.0);
/// X = (1/2 - x) + kappa (x^2 - x + 1/6); mean zero with
/// M0 = 1/2 + kappa/6 and M1 = -1/2 + kappa/6.
Observable quadratic_x(double kappa, double scale = 1.0);
/// Bilinear interpolation of values on a uniform (nx+1) x (ny+1) grid over
/// the square, row-major in x.  Mean zero is decided by quadrature.
Observable custom_grid(int nx, int ny, std::vector<double> values);
/// The constant function c.
Observable constant_observable(double c);
/// Lipschitz approximation of the indicator of Lambda: a ramp of the given
/// width inside [p,q], 1 on [p+width, q-width], 0 outside.
Observable smoothed_base_indicator(const InducedSystem& sys, double width = 0.05);
/// s X.
Observable scaled(const Observable& obs, double s);

/// Integral of X over the unit square.
double integral(const Observable& obs, double tol = 1e-10);

struct Moments {
  double M0 = 0.0;
  double M1 = 0.0;
};
/// M0 = int_0^1 X(0, y^{1+1/alpha0}) dy,  M1 = int_0^1 X(1, y^{1+1/alpha1}) dy.
Moments moments_M(const Observable& obs, const InducedSystem& sys);

struct TailConstants {
  double C0 = 0.0;
  double C1 = 0.0;
};
/// C_j = |M_j|/(alpha_j Leb) (|M_j|(alpha_j+1)/(c_j alpha_j))^{1/alpha_j}.
TailConstants constants_C(double M0, double M1, const InducedSystem& sys);

/// Sum of X along the excursion from pt until its first return to Lambda.
struct XiValue {
  double xi = 0.0;
  std::int64_t r = 0;
};
XiValue xi(const Observable& obs, const InducedSystem& sys, SquarePoint pt);

struct XiTailRow {
  double t = 0.0;
  double right_upper = 0.0;  // lambda([xi >  t] n [A,q])
  double right_lower = 0.0;  // lambda([xi < -t] n [A,q])
  double left_upper = 0.0;   // lambda([xi >  t] n [p,A])
  double left_lower = 0.0;   // lambda([xi < -t] n [p,A])
  double predicted_right = 0.0;  // C0 t^{-(1+1/alpha0)} on the side M0 points to
  double predicted_left = 0.0;   // C1 t^{-(1+1/alpha1)}
};
struct XiTailReport {
  std::int64_t samples = 0;
  std::int64_t censored = 0;
  double M0 = 0.0;
  double M1 = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  std::vector<XiTailRow> rows;
};
/// Empirical tails of xi under lambda from lambda-uniform samples.
XiTailReport xi_tail(const Observable& obs, const InducedSystem& sys,
                     std::span<const double> t_grid, std::int64_t samples,
                     std::uint64_t seed, unsigned threads = 0);

struct CorrelationEstimate {
  std::int64_t k = 0;
  double cor = 0.0;     // |covariance|
  double signed_cov = 0.0;
  double se = 0.0;
};

/// Cor(k) = |int psi o B^k eta dLeb - int psi int eta| from n_samples
/// stratified Lebesgue points of the square.
CorrelationEstimate correlation(const IbtMap& m, const Observable& psi, const Observable& eta,
                                std::int64_t k, std::int64_t n_samples, std::uint64_t seed,
                                unsigned threads = 0);

/// Correlations at several lags from sliding windows along stationary
/// trajectories: n_traj independent Lebesgue-distributed starts, each
/// contributing `window` products per lag.  The standard error comes from
/// the spread between trajectories.
std::vector<CorrelationEstimate> correlation_profile(const IbtMap& m, const Observable& psi,
                                                     const Observable& eta,
                                                     std::span<const std::int64_t> lags,
                                                     std::int64_t n_traj, std::int64_t window,
                                                     std::uint64_t seed, unsigned threads = 0);

enum class LimitCase { kClt, kStableOneSided, kStableTwoSided, kNonstandardClt, kOutOfScope };
std::string to_string(LimitCase c);

struct LimitPrediction {
  LimitCase case_id = LimitCase::kOutOfScope;
  std::string norming;  // "sqrt(n)", "n^(alpha/(alpha+1))", "sqrt(n log n)"
  double norming_power = 0.5;  // A_n = n^power (times sqrt(log n) for case iv)
  bool log_correction = false;
  std::optional<StableParams> stable;  // cases ii and iii
  std::optional<double> variance;      // case iv; case i needs Green-Kubo
  double M0 = 0.0;
  double M1 = 0.0;
  double C0 = 0.0;
  double C1 = 0.0;
  bool inferred_by_symmetry = false;
  std::string note;
  /// The same law with the renewal mean 1/Leb(Lambda) kept in the scale:
  /// a (case ii, iii) or the variance (case iv) multiplied by Leb(Lambda).
  std::optional<StableParams> stable_renewal;
  std::optional<double> variance_renewal;

  /// A_n for this case.
  [[nodiscard]] double norm(double n) const;
};

/// Case selection from (alpha0, alpha1, M0, M1).
LimitPrediction predict_limit(const Observable& obs, const InducedSystem& sys);

/// Same, with the moments supplied (used when M's are known exactly).
LimitPrediction predict_limit(const Moments& mom, const InducedSystem& sys, double gamma);

struct EnsembleResult {
  std::vector<double> sums;  // S_n / A_n, one per trajectory
  std::int64_t redrawn = 0;  // starts discarded because the orbit hit the cut
};

/// S_n / norm for n_traj Lebesgue-uniform starts.  Trajectory i uses the
/// RNG stream (seed, i), so results do not depend on the thread count.
EnsembleResult birkhoff_ensemble(const Observable& obs, const IbtMap& m, std::int64_t n,
                                 std::int64_t n_traj, std::uint64_t seed, double norm,
                                 unsigned threads = 0);

/// (1/N) sum exp(i t s) for each t.
std::vector<std::complex<double>> empirical_cf(std::span<const double> samples,
                                               std::span<const double> t_grid);

struct GreenKubo {
  double sigma2 = 0.0;
  double sigma2_se = 0.0;
  std::int64_t lags_used = 0;
  std::vector<CorrelationEstimate> terms;  // signed covariances by lag
};

/// sigma^2 = C(0) + 2 sum_{k>=1} C(k) from sliding-window covariances of a
/// mean-zero observable, truncated at the first lag whose standard error
/// exceeds its magnitude.
GreenKubo green_kubo(const Observable& obs, const IbtMap& m, std::int64_t max_lag,
                     std::int64_t n_traj, std::int64_t window, std::uint64_t seed,
                     unsigned threads = 0);

}  // namespace ibt
