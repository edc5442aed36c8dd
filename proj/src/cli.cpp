#include "ibt/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ibt/baker.hpp"
#include "ibt/error.hpp"
#include "ibt/icf.hpp"
#include "ibt/induced.hpp"
#include "ibt/limits.hpp"
#include "ibt/numerics.hpp"
#include "ibt/stable.hpp"
#include "ibt/ulam.hpp"

#ifndef IBT_VERSION
#define IBT_VERSION "0.0.0"
#endif

namespace ibt::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kOutputDirEnv = "IBT_OUTPUT_DIR";

// Raised for problems with the command line or config file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Output sink opened before any computation so that an unwritable path fails
// fast.  An empty path means the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (path.empty() || path == "-") return;
    std::filesystem::path target(path);
    const char* dir = std::getenv(kOutputDirEnv);
    if (target.is_relative() && dir != nullptr && *dir != '\0') target = std::filesystem::path(dir) / target;
    file_ = std::make_unique<std::ofstream>(target, std::ios::binary | std::ios::trunc);
    if (!*file_) throw OutputError("cannot open output file '" + target.string() + "'");
    path_ = target.string();
  }

  std::ostream& stream() { return file_ ? *file_ : fallback_; }

  void finish() {
    if (file_) {
      file_->flush();
      if (!*file_) throw OutputError("write to '" + path_ + "' failed");
    }
  }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

Json envelope(const std::string& command, const Json& config) {
  Json j;
  j["tool"] = "ibt";
  j["version"] = IBT_VERSION;
  j["command"] = command;
  j["config"] = config;
  return j;
}

void write_json(Sink& sink, const Json& j) {
  sink.stream() << j.dump(2) << '\n';
  sink.finish();
}

// CSV files carry the envelope as leading comment lines.
void write_csv_header(Sink& sink, const Json& env, const Json& counters,
                      const std::string& columns) {
  Json head = env;
  head["counters"] = counters;
  std::ostream& os = sink.stream();
  os << "# " << head.dump() << '\n';
  os << columns << '\n';
}

CutFunction family(double alpha0, double alpha1) { return make_beta_icf(alpha0, alpha1); }

void add_family(CLI::App* sub, double& a0, double& a1) {
  sub->add_option("--alpha0", a0, "contact exponent at x = 0")->check(CLI::PositiveNumber);
  sub->add_option("--alpha1", a1, "contact exponent at x = 1")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------- icf-info

struct IcfInfoArgs {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  double probe = 1e-6;
  std::string out;
};

void run_icf_info(const IcfInfoArgs& a, std::ostream& out) {
  if (!(a.probe > 0.0 && a.probe <= 1e-3)) throw InvalidParameter("--probe must lie in (0, 1e-3]");
  Sink sink(a.out, out);
  const CutFunction cf = family(a.alpha0, a.alpha1);
  const FactorMap fm(cf);
  const ContactReport rep = verify_contact(cf, a.probe);
  Json cfg{{"alpha0", a.alpha0}, {"alpha1", a.alpha1}, {"probe", a.probe}};
  Json j = envelope("icf-info", cfg);
  j["alpha0"] = cf.alpha0();
  j["alpha1"] = cf.alpha1();
  j["c0"] = cf.c0();
  j["c1"] = cf.c1();
  j["A"] = fm.A();
  j["A_quadrature"] = fm.A_quadrature();
  j["contact"] = {{"probe", rep.probe},
                  {"c0_estimate", rep.c0_est},
                  {"c1_estimate", rep.c1_est},
                  {"rel_err0", rep.rel_err0},
                  {"rel_err1", rep.rel_err1}};
  write_json(sink, j);
}

// -------------------------------------------------------------- trajectory

struct TrajectoryArgs {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  double x0 = 0.3;
  double y0 = 0.3;
  std::int64_t n = 1000;
  std::string out;
};

void run_trajectory(const TrajectoryArgs& a, std::ostream& out) {
  if (!(a.x0 >= 0.0 && a.x0 <= 1.0 && a.y0 >= 0.0 && a.y0 <= 1.0)) {
    throw InvalidParameter("--x0 and --y0 must lie in [0, 1]");
  }
  Sink sink(a.out, out);
  const IbtMap m(family(a.alpha0, a.alpha1));
  const std::vector<SquarePoint> traj = iterate(m, {a.x0, a.y0}, a.n);
  Json cfg{{"alpha0", a.alpha0}, {"alpha1", a.alpha1}, {"x0", a.x0}, {"y0", a.y0}, {"n", a.n}};
  write_csv_header(sink, envelope("trajectory", cfg), Json::object(), "k,x,y");
  std::ostream& os = sink.stream();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << k << ',' << format_double(traj[k].x) << ',' << format_double(traj[k].y) << '\n';
  }
  sink.finish();
}

// -------------------------------------------------------------- orbit-asym

struct OrbitArgs {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  std::int64_t nmax = 100000;
  std::string out;
};

void run_orbit_asym(const OrbitArgs& a, std::ostream& out) {
  Sink sink(a.out, out);
  const IbtMap m(family(a.alpha0, a.alpha1));
  const InducedSystem sys(m, std::max<std::int64_t>(a.nmax + 2, 1000));
  const OrbitAsymptoticsReport rep = check_orbit_asymptotics(sys, a.nmax);
  Json cfg{{"alpha0", a.alpha0}, {"alpha1", a.alpha1}, {"nmax", a.nmax}};
  Json j = envelope("orbit-asym", cfg);
  j["p"] = sys.p();
  j["q"] = sys.q();
  j["leb"] = sys.leb();
  j["mean_return_time"] = mean_return_time(sys);
  Json checks = Json::array();
  for (const AsymptoticCheck& c : rep.checks) {
    Json trace = Json::array();
    for (const auto& [n, r] : c.trace) trace.push_back({{"n", n}, {"ratio", r}});
    checks.push_back({{"name", c.name},
                      {"predicted_constant", c.predicted_constant},
                      {"exponent", c.exponent},
                      {"ratio", c.ratio},
                      {"trace", trace}});
  }
  j["checks"] = checks;
  write_json(sink, j);
}

// ------------------------------------------------------------- return-hist

struct ReturnHistArgs {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  std::int64_t samples = 1000000;
  std::int64_t max_n = 1000;
  std::uint64_t seed = 1;
  std::string out;
};

void run_return_hist(const ReturnHistArgs& a, std::ostream& out, unsigned threads) {
  Sink sink(a.out, out);
  const IbtMap m(family(a.alpha0, a.alpha1));
  const InducedSystem sys(m);
  if (a.max_n > sys.cells().n_max) throw InvalidParameter("--max-n exceeds the cell table");
  constexpr std::int64_t kChunk = 1 << 16;
  const auto chunks = static_cast<std::size_t>((a.samples + kChunk - 1) / kChunk);
  const auto width = static_cast<std::size_t>(a.max_n) + 2;  // last slot: r > max_n
  std::vector<std::vector<std::int64_t>> hist(chunks, std::vector<std::int64_t>(width, 0));
  std::vector<std::int64_t> censored(chunks, 0);
  std::vector<std::int64_t> redrawn(chunks, 0);
  parallel_chunks(chunks, threads, [&](std::size_t c) {
    std::mt19937_64 rng = make_stream(a.seed, c);
    const std::int64_t lo = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t hi = std::min(a.samples, lo + kChunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      for (;;) {
        const double x = sys.p() + (sys.q() - sys.p()) * uniform_open(rng);
        try {
          const std::int64_t r = return_time(sys, x);
          ++hist[c][static_cast<std::size_t>(std::min(r, a.max_n + 1))];
        } catch (const TailOverflow&) {
          ++censored[c];
          ++hist[c][width - 1];
        } catch (const NearCutError&) {
          ++redrawn[c];
          continue;
        }
        break;
      }
    }
  });
  std::vector<std::int64_t> total(width, 0);
  for (const auto& h : hist) {
    for (std::size_t n = 0; n < width; ++n) total[n] += h[n];
  }
  std::int64_t cens = 0;
  std::int64_t redraw = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    cens += censored[c];
    redraw += redrawn[c];
  }
  Json cfg{{"alpha0", a.alpha0}, {"alpha1", a.alpha1}, {"samples", a.samples},
           {"max_n", a.max_n},   {"seed", a.seed}};
  write_csv_header(sink, envelope("return-hist", cfg),
                   Json{{"censored", cens}, {"redrawn", redraw}},
                   "n,count,lambda_predicted");
  std::ostream& os = sink.stream();
  for (std::int64_t n = 2; n <= a.max_n; ++n) {
    os << n << ',' << total[static_cast<std::size_t>(n)] << ',' << format_double(cell_measure(sys, n))
       << '\n';
  }
  os << '>' << a.max_n << ',' << total[width - 1] << ',' << format_double(tail_measure(sys, a.max_n))
     << '\n';
  sink.finish();
}

// ------------------------------------------------------------ correlations

struct CorrelationArgs {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  std::int64_t kmax = 1000;
  std::int64_t samples = 10000000;
  std::int64_t window = 10000;
  double width = 0.05;
  std::uint64_t seed = 1;
  std::string out;
};

std::vector<std::int64_t> log_lags(std::int64_t kmax) {
  std::vector<std::int64_t> lags;
  for (std::int64_t decade = 1; decade <= kmax; decade *= 10) {
    for (std::int64_t m : {1, 2, 5}) {
      if (m * decade <= kmax) lags.push_back(m * decade);
    }
  }
  if (lags.back() != kmax) lags.push_back(kmax);
  return lags;
}

void run_correlations(const CorrelationArgs& a, std::ostream& out, unsigned threads) {
  if (a.samples < 2 * a.window) throw InvalidParameter("--samples must be at least 2 * --window");
  Sink sink(a.out, out);
  const IbtMap m(family(a.alpha0, a.alpha1));
  const InducedSystem sys(m);
  const Observable ind = smoothed_base_indicator(sys, a.width);
  const std::vector<std::int64_t> lags = log_lags(a.kmax);
  const std::int64_t n_traj = a.samples / a.window;
  const auto est = correlation_profile(m, ind, ind, lags, n_traj, a.window, a.seed, threads);
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& e : est) {
    if (e.k >= 10 && e.cor > 0.0) {
      lx.push_back(std::log(static_cast<double>(e.k)));
      ly.push_back(std::log(e.cor));
    }
  }
  Json counters{{"n_traj", n_traj}};
  if (lx.size() >= 2) counters["slope_k_ge_10"] = fit_line(lx, ly).slope;
  Json cfg{{"alpha0", a.alpha0}, {"alpha1", a.alpha1}, {"kmax", a.kmax}, {"samples", a.samples},
           {"window", a.window},  {"width", a.width},   {"seed", a.seed}};
  write_csv_header(sink, envelope("correlations", cfg), counters, "k,cor,se");
  std::ostream& os = sink.stream();
  for (const auto& e : est) {
    os << e.k << ',' << format_double(e.cor) << ',' << format_double(e.se) << '\n';
  }
  sink.finish();
}

// --------------------------------------------------------------- limit-law

Json read_config(const std::string& path) {
  if (path.empty()) throw UsageError("--config is required");
  std::ifstream in(path);
  if (!in) throw UsageError("config not found: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
}

template <typename T>
T require(const Json& cfg, const char* key) {
  if (!cfg.contains(key)) throw UsageError(std::string("config: missing '") + key + "'");
  try {
    return cfg.at(key).get<T>();
  } catch (const Json::exception&) {
    throw UsageError(std::string("config: wrong type for '") + key + "'");
  }
}

template <typename T>
T optional_field(const Json& cfg, const char* key, T fallback) {
  return cfg.contains(key) ? require<T>(cfg, key) : fallback;
}

Observable observable_from(const Json& spec) {
  const auto kind = require<std::string>(spec, "kind");
  const auto params = optional_field<std::vector<double>>(spec, "params", {});
  Observable obs;
  if (kind == "linear-x" || kind == "linear-y") {
    if (params.size() > 1) throw UsageError("observable " + kind + ": params = [scale]");
    const double scale = params.empty() ? 1.0 : params[0];
    obs = kind == "linear-x" ? linear_x(scale) : linear_y(scale);
  } else if (kind == "quadratic-x") {
    if (params.empty() || params.size() > 2) {
      throw UsageError("observable quadratic-x: params = [kappa, scale?]");
    }
    obs = quadratic_x(params[0], params.size() > 1 ? params[1] : 1.0);
  } else if (kind == "custom-grid") {
    if (params.size() < 2) throw UsageError("observable custom-grid: params = [nx, ny, values...]");
    const double nx = params[0];
    const double ny = params[1];
    if (nx != std::floor(nx) || ny != std::floor(ny)) {
      throw UsageError("observable custom-grid: nx, ny must be integers");
    }
    obs = custom_grid(static_cast<int>(nx), static_cast<int>(ny),
                      std::vector<double>(params.begin() + 2, params.end()));
  } else {
    throw UsageError("unknown observable kind '" + kind + "'");
  }
  obs.gamma = optional_field<double>(spec, "gamma", 1.0);
  if (!(obs.gamma > 0.0 && obs.gamma <= 1.0)) throw UsageError("observable: gamma must lie in (0, 1]");
  return obs;
}

Json stable_json(const StableParams& sp) { return {{"p", sp.p}, {"a", sp.a}, {"b", sp.b}}; }

double cf_distance(std::span<const double> s, const StableParams& sp, const std::vector<double>& ts) {
  const auto emp = empirical_cf(s, ts);
  double d = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) d = std::max(d, std::abs(emp[i] - char_fn(sp, ts[i])));
  return d;
}

Json law_diagnostics(std::span<const double> sums, const StableParams& sp,
                     const std::vector<double>& ts) {
  return {{"law", stable_json(sp)},
          {"ks", ks_distance(sums, sp)},
          {"cf_sup_distance", cf_distance(sums, sp, ts)},
          {"cdf_at_zero", cdf(sp, 0.0)}};
}

void run_limit_law(const std::string& config_path, const std::string& out_path, std::ostream& out,
                   unsigned threads) {
  const Json raw = read_config(config_path);
  if (!raw.is_object()) throw UsageError("config must be a JSON object");
  // Resolve every field with its default before computing anything.
  Json cfg;
  cfg["alpha0"] = require<double>(raw, "alpha0");
  cfg["alpha1"] = require<double>(raw, "alpha1");
  if (!raw.contains("observable") || !raw["observable"].is_object()) {
    throw UsageError("config: missing 'observable' object");
  }
  cfg["observable"] = raw["observable"];
  cfg["n"] = require<std::int64_t>(raw, "n");
  cfg["n_traj"] = require<std::int64_t>(raw, "n_traj");
  if (!raw.contains("seed")) throw UsageError("config: 'seed' is mandatory");
  if (!raw["seed"].is_number_unsigned()) throw UsageError("config: 'seed' must be a non-negative integer");
  cfg["seed"] = require<std::uint64_t>(raw, "seed");
  cfg["r_max"] = optional_field<std::int64_t>(raw, "r_max", InducedSystem::kDefaultRMax);
  cfg["n_cells"] = optional_field<std::int64_t>(raw, "n_cells", InducedSystem::kDefaultCells);
  cfg["t_grid"] = optional_field<std::vector<double>>(raw, "t_grid", {0.25, 0.5, 1.0, 2.0});
  const Json gk_raw = raw.value("green_kubo", Json::object());
  cfg["green_kubo"] = {{"max_lag", optional_field<std::int64_t>(gk_raw, "max_lag", 200)},
                       {"n_traj", optional_field<std::int64_t>(gk_raw, "n_traj", 4000)},
                       {"window", optional_field<std::int64_t>(gk_raw, "window", 5000)}};
  for (const auto& [key, value] : raw.items()) {
    if (!cfg.contains(key)) throw UsageError("config: unknown field '" + key + "'");
  }

  const double a0 = cfg["alpha0"];
  const double a1 = cfg["alpha1"];
  const std::int64_t n = cfg["n"];
  const std::int64_t n_traj = cfg["n_traj"];
  const std::uint64_t seed = cfg["seed"];
  if (!(a0 > 0.0 && a1 > 0.0)) throw InvalidParameter("alpha0, alpha1 must be > 0");
  if (n < 2) throw InvalidParameter("n must be >= 2");
  if (n_traj < 2) throw InvalidParameter("n_traj must be >= 2");
  const std::vector<double> ts = cfg["t_grid"];
  for (double t : ts) {
    if (!std::isfinite(t)) throw InvalidParameter("t_grid values must be finite");
  }
  Observable obs = observable_from(cfg["observable"]);
  if (!obs.mean_zero) throw InvalidParameter("observable must have mean zero");

  Sink sink(out_path, out);
  const IbtMap m(family(a0, a1));
  const InducedSystem sys(m, cfg["n_cells"].get<std::int64_t>(), cfg["r_max"].get<std::int64_t>());
  const LimitPrediction lp = predict_limit(obs, sys);

  Json j = envelope("limit-law", cfg);
  Json pred{{"case", to_string(lp.case_id)},
            {"norming", lp.norming},
            {"M0", lp.M0},
            {"M1", lp.M1},
            {"C0", lp.C0},
            {"C1", lp.C1},
            {"inferred_by_symmetry", lp.inferred_by_symmetry},
            {"note", lp.note}};
  if (lp.stable) pred["stable"] = stable_json(*lp.stable);
  if (lp.variance) pred["variance"] = *lp.variance;
  if (lp.stable_renewal) pred["stable_renewal"] = stable_json(*lp.stable_renewal);
  if (lp.variance_renewal) pred["variance_renewal"] = *lp.variance_renewal;
  j["prediction"] = pred;
  j["leb_base"] = sys.leb();

  if (lp.case_id == LimitCase::kOutOfScope) {
    j["counters"] = {{"redrawn", 0}, {"censored", 0}};
    write_json(sink, j);
    return;
  }

  const double norm = lp.norm(static_cast<double>(n));
  std::optional<GreenKubo> gk;
  if (lp.case_id == LimitCase::kClt) {
    const Json& g = cfg["green_kubo"];
    gk = green_kubo(obs, m, g["max_lag"], g["n_traj"], g["window"], seed + 1, threads);
  }
  const EnsembleResult ens = birkhoff_ensemble(obs, m, n, n_traj, seed, norm, threads);
  const std::vector<double>& s = ens.sums;

  CompensatedSum sum;
  for (double v : s) sum.add(v);
  const double mean = sum.value() / static_cast<double>(s.size());
  CompensatedSum sq;
  for (double v : s) sq.add((v - mean) * (v - mean));
  const double var = sq.value() / static_cast<double>(s.size() - 1);
  std::vector<double> sorted(s);
  std::sort(sorted.begin(), sorted.end());
  const auto below = std::lower_bound(sorted.begin(), sorted.end(), 0.0) - sorted.begin();
  Json quant = Json::object();
  for (double qv : {0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99}) {
    const auto idx = static_cast<std::size_t>(qv * static_cast<double>(sorted.size() - 1));
    quant[format_double(qv)] = sorted[idx];
  }
  j["ensemble"] = {{"norm", norm},
                   {"mean", mean},
                   {"variance", var},
                   {"empirical_cdf_at_zero",
                    static_cast<double>(below) / static_cast<double>(sorted.size())},
                   {"quantiles", quant}};

  Json diag;
  if (lp.stable) {
    diag["predicted"] = law_diagnostics(s, *lp.stable, ts);
    diag["renewal"] = law_diagnostics(s, *lp.stable_renewal, ts);
  } else if (lp.variance) {
    diag["variance_ratio"] = var / *lp.variance;
    diag["variance_ratio_renewal"] = var / *lp.variance_renewal;
    diag["predicted"] = law_diagnostics(s, StableParams{2.0, *lp.variance / 2.0, 0.0}, ts);
    diag["renewal"] = law_diagnostics(s, StableParams{2.0, *lp.variance_renewal / 2.0, 0.0}, ts);
  } else if (gk) {
    Json terms = Json::array();
    for (const auto& t : gk->terms) terms.push_back({{"k", t.k}, {"cov", t.signed_cov}, {"se", t.se}});
    diag["green_kubo"] = {{"sigma2", gk->sigma2},
                          {"sigma2_se", gk->sigma2_se},
                          {"lags_used", gk->lags_used},
                          {"terms", terms}};
    if (gk->sigma2 > 0.0) {
      diag["predicted"] = law_diagnostics(s, StableParams{2.0, gk->sigma2 / 2.0, 0.0}, ts);
    }
  }
  j["diagnostics"] = diag;
  j["counters"] = {{"redrawn", ens.redrawn}, {"censored", 0}};
  write_json(sink, j);
}

// ----------------------------------------------------------- sample-stable

struct SampleStableArgs {
  double p = 1.5;
  double a = 1.0;
  double b = 0.0;
  std::int64_t n = 1000;
  std::uint64_t seed = 1;
  std::string out;
};

void run_sample_stable(const SampleStableArgs& a, std::ostream& out, unsigned threads) {
  const StableParams sp{a.p, a.a, a.b};
  sp.validate();
  Sink sink(a.out, out);
  const std::vector<double> s = sample(sp, a.seed, a.n, threads);
  Json cfg{{"p", a.p}, {"a", a.a}, {"b", a.b}, {"n", a.n}, {"seed", a.seed}};
  write_csv_header(sink, envelope("sample-stable", cfg), Json::object(), "x");
  std::ostream& os = sink.stream();
  for (double v : s) os << format_double(v) << '\n';
  sink.finish();
}

// ---------------------------------------------------------------- ulam-gap

struct UlamArgs {
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  int bins = 256;
  std::int64_t samples = 10000;
  int k = 6;
  std::uint64_t seed = 1;
  std::string out;
};

void run_ulam_gap(const UlamArgs& a, std::ostream& out, unsigned threads) {
  if (a.bins < 16) throw InvalidParameter("--bins must be >= 16");
  if (a.k < 1 || a.k > a.bins) throw InvalidParameter("--k must lie in [1, bins]");
  Sink sink(a.out, out);
  const IbtMap m(family(a.alpha0, a.alpha1));
  const InducedSystem sys(m);
  const UlamOperator op = build_ulam(sys, a.bins, a.samples, a.seed, threads);
  const auto ev = leading_spectrum(op, a.k);
  const auto density = invariant_density(op);
  double dev = 0.0;
  for (double d : density) dev = std::max(dev, std::fabs(d * a.bins - 1.0));
  Json cfg{{"alpha0", a.alpha0}, {"alpha1", a.alpha1}, {"bins", a.bins},
           {"samples", a.samples}, {"k", a.k},       {"seed", a.seed}};
  Json j = envelope("ulam-gap", cfg);
  Json eig = Json::array();
  for (const auto& z : ev) eig.push_back({{"re", z.real()}, {"im", z.imag()}, {"modulus", std::abs(z)}});
  j["eigenvalues"] = eig;
  j["gap"] = ev.size() > 1 ? 1.0 - std::abs(ev[1]) : 1.0;
  j["density_max_deviation"] = dev;
  j["counters"] = {{"redrawn", op.redrawn}};
  write_json(sink, j);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intermittent baker's transformations: simulation and checks", "ibt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(IBT_VERSION));
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);

  IcfInfoArgs icf;
  auto* s_icf = app.add_subcommand("icf-info", "cut function constants and contact audit");
  add_family(s_icf, icf.alpha0, icf.alpha1);
  s_icf->add_option("--probe", icf.probe, "probe point for the contact audit");
  s_icf->add_option("--out", icf.out, "output JSON (default stdout)");

  TrajectoryArgs tr;
  auto* s_tr = app.add_subcommand("trajectory", "orbit of B as CSV rows k,x,y");
  add_family(s_tr, tr.alpha0, tr.alpha1);
  s_tr->add_option("--x0", tr.x0);
  s_tr->add_option("--y0", tr.y0);
  s_tr->add_option("--n", tr.n)->check(CLI::NonNegativeNumber);
  s_tr->add_option("--out", tr.out, "output CSV (default stdout)");

  OrbitArgs orb;
  auto* s_orb = app.add_subcommand("orbit-asym", "period-two orbit preimage asymptotics");
  add_family(s_orb, orb.alpha0, orb.alpha1);
  s_orb->add_option("--nmax", orb.nmax)->check(CLI::Range(std::int64_t{1000}, std::int64_t{10000000}));
  s_orb->add_option("--out", orb.out, "output JSON (default stdout)");

  ReturnHistArgs rh;
  auto* s_rh = app.add_subcommand("return-hist", "histogram of return times to the base");
  add_family(s_rh, rh.alpha0, rh.alpha1);
  s_rh->add_option("--samples", rh.samples)->check(CLI::PositiveNumber);
  s_rh->add_option("--max-n", rh.max_n)->check(CLI::Range(std::int64_t{2}, std::int64_t{1000000}));
  s_rh->add_option("--seed", rh.seed);
  s_rh->add_option("--out", rh.out, "output CSV (default stdout)");

  CorrelationArgs co;
  auto* s_co = app.add_subcommand("correlations", "correlation decay of the smoothed base indicator");
  add_family(s_co, co.alpha0, co.alpha1);
  s_co->add_option("--kmax", co.kmax)->check(CLI::PositiveNumber);
  s_co->add_option("--samples", co.samples, "trajectory points per lag")->check(CLI::PositiveNumber);
  s_co->add_option("--window", co.window)->check(CLI::PositiveNumber);
  s_co->add_option("--width", co.width, "ramp width of the smoothed indicator")
      ->check(CLI::PositiveNumber);
  s_co->add_option("--seed", co.seed);
  s_co->add_option("--out", co.out, "output CSV (default stdout)");

  std::string ll_config;
  std::string ll_out;
  auto* s_ll = app.add_subcommand("limit-law", "Birkhoff-sum ensemble against the predicted law");
  s_ll->add_option("--config", ll_config, "experiment JSON");
  s_ll->add_option("--out", ll_out, "output JSON (default stdout)");

  SampleStableArgs ss;
  auto* s_ss = app.add_subcommand("sample-stable", "samples of St(p, a, b)");
  s_ss->add_option("--p", ss.p);
  s_ss->add_option("--a", ss.a);
  s_ss->add_option("--b", ss.b);
  s_ss->add_option("--n", ss.n)->check(CLI::PositiveNumber);
  s_ss->add_option("--seed", ss.seed);
  s_ss->add_option("--out", ss.out, "output CSV (default stdout)");

  UlamArgs ul;
  auto* s_ul = app.add_subcommand("ulam-gap", "Ulam matrix of the induced factor map");
  add_family(s_ul, ul.alpha0, ul.alpha1);
  s_ul->add_option("--bins", ul.bins);
  s_ul->add_option("--samples", ul.samples, "samples per bin")->check(CLI::PositiveNumber);
  s_ul->add_option("--k", ul.k, "number of eigenvalues");
  s_ul->add_option("--seed", ul.seed);
  s_ul->add_option("--out", ul.out, "output JSON (default stdout)");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << IBT_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ibt: " << e.what() << '\n';
    return kValidation;
  }

  if (threads > 0) set_default_threads(threads);
  const unsigned nthreads = default_threads();
  try {
    if (*s_icf) run_icf_info(icf, out);
    else if (*s_tr) run_trajectory(tr, out);
    else if (*s_orb) run_orbit_asym(orb, out);
    else if (*s_rh) run_return_hist(rh, out, nthreads);
    else if (*s_co) run_correlations(co, out, nthreads);
    else if (*s_ll) run_limit_law(ll_config, ll_out, out, nthreads);
    else if (*s_ss) run_sample_stable(ss, out, nthreads);
    else if (*s_ul) run_ulam_gap(ul, out, nthreads);
  } catch (const UsageError& e) {
    err << "ibt: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidParameter& e) {
    err << "ibt: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "ibt: " << e.what() << '\n';
    return kValidation;
  } catch (const OutputError& e) {
    err << "ibt: " << e.what() << '\n';
    return kUnwritable;
  } catch (const std::exception& e) {
    err << "ibt: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace ibt::cli
