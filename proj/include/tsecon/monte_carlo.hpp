#pragma once

/// Monte Carlo engine: null-distribution quantiles for nonstandard statistics
/// and size/power estimation. Replication r draws only from stream (seed, r)
/// and results are sorted before quantiles are read, so output does not
/// depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tsecon/breaks.hpp"
#include "tsecon/cointegration.hpp"
#include "tsecon/dgp.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/random.hpp"
#include "tsecon/test_report.hpp"
#include "tsecon/unit_root.hpp"

namespace tsecon {

inline constexpr std::uint64_t kDefaultCvSeed = 20150420;
inline constexpr std::size_t kDefaultCvReps = 100000;
inline constexpr std::size_t kDefaultCvTsim = 500;
inline constexpr std::size_t kMinMcReps = 1000;

/// Levels always stored alongside the requested ones so that p-value
/// brackets are available from any cached entry.
inline const std::vector<double> kCachedLevels{0.01, 0.025, 0.05, 0.10};

[[nodiscard]] inline std::size_t default_workers() {
  const auto n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Evaluate fn(0..reps-1) on `workers` threads; out[r] = fn(r).
template <class Fn>
[[nodiscard]] std::vector<double> run_replications(std::size_t reps, std::size_t workers, Fn&& fn) {
  std::vector<double> out(reps, 0.0);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(reps, 1));
  if (workers == 1) {
    for (std::size_t r = 0; r < reps; ++r) out[r] = fn(r);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps) return;
      try {
        out[r] = fn(r);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(reps);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Type-7 (linear interpolation) quantile of sorted data.
[[nodiscard]] inline double sorted_quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

enum class StatisticKind { adf, eg_adf, qlr };

[[nodiscard]] inline std::string to_string(StatisticKind k) {
  switch (k) {
    case StatisticKind::adf: return "adf";
    case StatisticKind::eg_adf: return "eg_adf";
    case StatisticKind::qlr: return "qlr";
  }
  return "adf";
}

[[nodiscard]] inline StatisticKind parse_statistic_kind(const std::string& s) {
  if (s == "adf") return StatisticKind::adf;
  if (s == "eg_adf" || s == "eg-adf" || s == "coint") return StatisticKind::eg_adf;
  if (s == "qlr") return StatisticKind::qlr;
  throw DomainError("unknown statistic kind '" + s + "'");
}

[[nodiscard]] inline Tail statistic_tail(StatisticKind k) { return k == StatisticKind::qlr ? Tail::right : Tail::left; }

/// Identifies one null distribution: statistic, its deterministic
/// terms, and the simulation settings.
struct CvRequest {
  StatisticKind kind = StatisticKind::adf;
  /// adf
  Deterministic deterministic = Deterministic::drift;
  /// adf and eg_adf
  LagPolicy lags = LagPolicy::bic();
  /// eg_adf: number of I(1) regressors
  std::size_t n_regressors = 1;
  /// qlr: AR order and trimming
  std::size_t ar_order = 1;
  double trim = kDefaultQlrTrim;
  std::size_t t_sim = kDefaultCvTsim;
  std::size_t reps = kDefaultCvReps;
  std::uint64_t seed = kDefaultCvSeed;

  /// Cache key; every field that changes the distribution appears in it.
  [[nodiscard]] std::string key() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
      case StatisticKind::adf: os << "|det=" << to_string(deterministic) << "|lags=" << lags.key(); break;
      case StatisticKind::eg_adf: os << "|m=" << n_regressors << "|lags=" << lags.key(); break;
      case StatisticKind::qlr: os << "|p=" << ar_order << "|trim=" << trim; break;
    }
    os << "|T=" << t_sim << "|reps=" << reps << "|seed=" << seed;
    return os.str();
  }

  [[nodiscard]] provenance::MonteCarlo provenance() const {
    return {seed, reps, t_sim, std::string(kRngName)};
  }
};

struct McSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct McRun {
  CvRequest request;
  Tail tail = Tail::left;
  /// significance level -> critical value
  std::map<double, double> quantiles;
  McSummary summary;

  [[nodiscard]] CriticalValues critical_values() const {
    CriticalValues cv;
    cv.tail = tail;
    cv.by_level = quantiles;
    cv.provenance = request.provenance();
    return cv;
  }
};

/// One draw of the statistic under its null, from stream `rng`.
[[nodiscard]] inline double null_statistic(const CvRequest& req, Rng& rng) {
  DgpSpec spec;
  switch (req.kind) {
    case StatisticKind::adf: {
      spec.kind = dgp::RandomWalk{};
      const auto y = simulate(spec, req.t_sim, rng).column(0);
      return adf_regression(y, AdfSpec{req.lags, req.deterministic}).statistic;
    }
    case StatisticKind::eg_adf: {
      spec.kind = dgp::IndependentRandomWalks{req.n_regressors + 1};
      const auto data = simulate(spec, req.t_sim, rng);
      std::vector<TimeSeries> xs;
      for (std::size_t i = 1; i < data.width(); ++i) xs.push_back(data.column(i));
      const auto reg = engle_granger_regression(data.column(0), xs, req.lags);
      return reg.degenerate ? std::numeric_limits<double>::quiet_NaN() : reg.adf.statistic;
    }
    case StatisticKind::qlr: {
      spec.kind = dgp::WhiteNoise{};
      const auto y = simulate(spec, req.t_sim, rng).column(0);
      return qlr_statistic(y, req.ar_order, req.trim).statistic;
    }
  }
  throw DomainError("unknown statistic kind");
}

/// Raw null draws of the statistic, indexed by replication.
[[nodiscard]] inline std::vector<double> null_draws(const CvRequest& req, std::size_t workers) {
  return run_replications(req.reps, workers, [&](std::size_t r) {
    Rng rng = Rng::stream(req.seed, r);
    return null_statistic(req, rng);
  });
}

[[nodiscard]] inline McRun mc_critical_values(const CvRequest& req, const std::vector<double>& levels,
                                              std::size_t workers = default_workers()) {
  if (req.reps < kMinMcReps) {
    throw DomainError("Monte Carlo critical values need at least " + std::to_string(kMinMcReps) + " replications");
  }
  if (req.kind == StatisticKind::eg_adf && (req.n_regressors < 1 || req.n_regressors > 4)) {
    throw DomainError("EG-ADF simulation supports 1 to 4 regressors");
  }
  for (double l : levels)
    if (!(l > 0.0 && l < 1.0)) throw DomainError("significance levels must lie in (0, 1)");

  auto draws = null_draws(req, workers);
  std::vector<double> finite;
  finite.reserve(draws.size());
  for (double d : draws)
    if (std::isfinite(d)) finite.push_back(d);
  if (finite.size() < draws.size() - draws.size() / 100) {
    throw NumericalError("more than 1% of Monte Carlo replications produced a non-finite statistic");
  }
  std::sort(finite.begin(), finite.end());

  McRun run;
  run.request = req;
  run.tail = statistic_tail(req.kind);
  for (double l : levels) run.quantiles[l] = sorted_quantile(finite, run.tail == Tail::left ? l : 1.0 - l);

  auto& s = run.summary;
  s.count = finite.size();
  long double sum = 0.0L;
  for (double d : finite) sum += d;
  s.mean = static_cast<double>(sum / static_cast<long double>(finite.size()));
  long double ss = 0.0L;
  for (double d : finite) ss += (d - s.mean) * (d - s.mean);
  s.sd = finite.size() > 1 ? std::sqrt(static_cast<double>(ss / static_cast<long double>(finite.size() - 1))) : 0.0;
  s.min = finite.front();
  s.max = finite.back();
  return run;
}

/// A test applied to one simulated data set.
using SimulatedTest = std::function<TestReport(const MultiSeries&)>;

struct SizePower {
  double size = 0.0;
  double power = 0.0;
  std::size_t reps = 0;
  std::size_t null_rejections = 0;
  std::size_t alt_rejections = 0;
};

/// Rejection rates at `level` under the null and alternative DGPs. Null
/// replication r uses stream 2r of `seed`, alternative replication r uses 2r + 1.
[[nodiscard]] inline SizePower size_power_suite(const SimulatedTest& test, const DgpSpec& null_spec,
                                                const DgpSpec& alt_spec, std::size_t T, std::size_t reps,
                                                double level, std::uint64_t seed,
                                                std::size_t workers = default_workers()) {
  if (reps == 0) throw DomainError("size/power suite needs at least one replication");
  null_spec.validate();
  alt_spec.validate();
  auto rejects = [&](const DgpSpec& spec, std::uint64_t stream) {
    Rng rng = Rng::stream(seed, stream);
    const auto report = test(simulate(spec, T, rng));
    return !report.degenerate && report.rejects(level) ? 1.0 : 0.0;
  };
  const auto null_hits = run_replications(reps, workers, [&](std::size_t r) { return rejects(null_spec, 2 * r); });
  const auto alt_hits = run_replications(reps, workers, [&](std::size_t r) { return rejects(alt_spec, 2 * r + 1); });

  SizePower out;
  out.reps = reps;
  out.null_rejections = static_cast<std::size_t>(std::accumulate(null_hits.begin(), null_hits.end(), 0.0));
  out.alt_rejections = static_cast<std::size_t>(std::accumulate(alt_hits.begin(), alt_hits.end(), 0.0));
  out.size = static_cast<double>(out.null_rejections) / static_cast<double>(reps);
  out.power = static_cast<double>(out.alt_rejections) / static_cast<double>(reps);
  return out;
}

}  // namespace tsecon
