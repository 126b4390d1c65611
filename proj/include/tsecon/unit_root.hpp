#pragma once

/// Augmented Dickey-Fuller unit-root regressions and tests.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/lag_select.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"
#include "tsecon/test_report.hpp"

namespace tsecon {

/// Deterministic terms in the Dickey-Fuller regression. `none` is used for
/// Engle-Granger residuals, which are mean-zero by construction.
enum class Deterministic { none, drift, trend };

[[nodiscard]] inline std::string to_string(Deterministic d) {
  switch (d) {
    case Deterministic::none: return "none";
    case Deterministic::drift: return "drift";
    case Deterministic::trend: return "trend";
  }
  return "drift";
}

[[nodiscard]] inline Deterministic parse_deterministic(const std::string& s) {
  if (s == "none") return Deterministic::none;
  if (s == "drift" || s == "c") return Deterministic::drift;
  if (s == "trend" || s == "ct" || s == "drift_and_trend") return Deterministic::trend;
  throw DomainError("unknown deterministic terms '" + s + "'");
}

/// Rule-of-thumb upper bound for automatic lag search: floor(4 (T/100)^{1/4}).
[[nodiscard]] inline std::size_t default_max_lag(std::size_t n) {
  return static_cast<std::size_t>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// Number of Delta-lags: fixed, or BIC-selected over 0..p_max.
struct LagPolicy {
  bool automatic = true;
  std::size_t lags = 0;
  /// automatic only; defaults to default_max_lag(T)
  std::optional<std::size_t> p_max;

  static LagPolicy fixed(std::size_t p) { return {false, p, std::nullopt}; }
  static LagPolicy bic(std::optional<std::size_t> p_max = std::nullopt) { return {true, 0, p_max}; }

  /// "auto", "auto:5" or "3"
  [[nodiscard]] std::string key() const {
    if (!automatic) return std::to_string(lags);
    return p_max ? "auto:" + std::to_string(*p_max) : "auto";
  }

  static LagPolicy parse(const std::string& s) {
    if (s == "auto") return bic();
    try {
      if (s.rfind("auto:", 0) == 0) return bic(std::stoul(s.substr(5)));
      return fixed(std::stoul(s));
    } catch (const std::exception&) {
      throw DomainError("invalid lag policy '" + s + "'");
    }
  }
};

struct AdfSpec {
  LagPolicy lags = LagPolicy::bic();
  Deterministic deterministic = Deterministic::drift;
};

/// Minimum effective sample for the ADF regression.
inline constexpr std::size_t kAdfMinSample = 20;

struct AdfRegression {
  double statistic = 0.0;
  double delta = 0.0;
  std::size_t lags = 0;
  std::size_t n_obs = 0;
  bool degenerate = false;
  OlsFit fit;
};

[[nodiscard]] inline DesignSpec adf_design(const std::string& name, Deterministic det, std::size_t lags,
                                           std::optional<std::size_t> first_row = std::nullopt) {
  DesignSpec spec{term::DiffLag{name, 0}, {}, first_row, std::nullopt};
  if (det != Deterministic::none) spec.regressors.emplace_back(term::Intercept{});
  if (det == Deterministic::trend) spec.regressors.emplace_back(term::Trend{});
  spec.regressors.emplace_back(term::Lag{name, 1});
  for (std::size_t j = 1; j <= lags; ++j) spec.regressors.emplace_back(term::DiffLag{name, static_cast<int>(j)});
  return spec;
}

/// t-ratio on delta in Delta Y_t = [b0 + a t] + delta Y_{t-1} + sum g_i Delta Y_{t-i} + u_t.
[[nodiscard]] inline AdfRegression adf_regression(const TimeSeries& series, const AdfSpec& spec) {
  const auto data = as_collection(series);
  const std::string name = series.name();
  const std::size_t n = series.size();
  std::size_t lags = spec.lags.lags;

  if (spec.lags.automatic) {
    const std::size_t p_max = spec.lags.p_max.value_or(default_max_lag(n));
    if (n < p_max + 1 + kAdfMinSample) throw DomainError("sample too small for ADF lag search");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= p_max; ++p) {
      const auto fit = solve_ols(build_design(adf_design(name, spec.deterministic, p, p_max + 1), data));
      const double ic = fit.ssr > 0.0 ? information_criterion(Criterion::bic, fit.ssr, fit.n_obs, fit.n_params)
                                      : -std::numeric_limits<double>::infinity();
      if (ic < best) {
        best = ic;
        lags = p;
      }
    }
  }
  if (n < lags + 1 + kAdfMinSample) {
    throw DomainError("sample too small: ADF needs an effective sample of at least " + std::to_string(kAdfMinSample));
  }

  AdfRegression out;
  out.fit = solve_ols(build_design(adf_design(name, spec.deterministic, lags), data));
  const std::size_t idx = out.fit.index_of(name + ".L1");
  out.delta = out.fit.coefficients(static_cast<Eigen::Index>(idx));
  out.lags = lags;
  out.n_obs = out.fit.n_obs;
  double scale = 0.0;
  for (double v : series.values()) scale = std::max(scale, std::abs(v));
  out.degenerate = !(out.fit.ser > 1e-12 * std::max(scale, 1e-300));
  out.statistic = out.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                 : out.fit.t_stats(static_cast<Eigen::Index>(idx));
  return out;
}

/// Left-tail test of H0: delta = 0 against H1: delta < 0. Critical values
/// come from the caller (normally the Monte Carlo cache).
[[nodiscard]] inline TestReport adf_test(const TimeSeries& series, const AdfSpec& spec, const CriticalValues& cvs,
                                         const std::vector<double>& levels = kDefaultLevels) {
  const auto reg = adf_regression(series, spec);
  TestReport r;
  r.name = "adf";
  r.statistic = reg.statistic;
  r.degenerate = reg.degenerate;
  r.distribution = "ADF t (nonstandard, " + to_string(spec.deterministic) + ")";
  r.nuisance["delta"] = reg.delta;
  r.nuisance["lags"] = static_cast<double>(reg.lags);
  r.nuisance["n_obs"] = static_cast<double>(reg.n_obs);
  if (reg.n_obs < 50) r.notes.push_back("effective sample below 50: critical values are less reliable");
  if (reg.degenerate) r.notes.push_back("regression residuals are identically zero; t-statistic undefined");
  if (cvs.tail != Tail::left) throw DomainError("ADF critical values must be left-tail");
  apply_critical_values(r, cvs, levels);
  return r;
}

}  // namespace tsecon
