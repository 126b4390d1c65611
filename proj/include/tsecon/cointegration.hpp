#pragma once

/// Integration-order classification, the Engle-Granger two-step ADF
/// cointegration test, and dynamic OLS.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"
#include "tsecon/test_report.hpp"
#include "tsecon/unit_root.hpp"

namespace tsecon {

enum class IntegrationOrder { I0, I1, I2 };

[[nodiscard]] inline std::string to_string(IntegrationOrder o) {
  switch (o) {
    case IntegrationOrder::I0: return "I(0)";
    case IntegrationOrder::I1: return "I(1)";
    case IntegrationOrder::I2: return "I(2)";
  }
  return "I(2)";
}

struct IntegrationOrderResult {
  IntegrationOrder order = IntegrationOrder::I0;
  /// ADF report on the level, then on each difference examined
  std::vector<TestReport> steps;
};

/// ADF ladder: level, then first difference; the first rejection at `level`
/// fixes the order, two failures classify as I(2).
[[nodiscard]] inline IntegrationOrderResult integration_order(const TimeSeries& series, const AdfSpec& spec,
                                                              const CriticalValues& cvs, double level = 0.05) {
  const std::vector<double> levels{level};
  IntegrationOrderResult out;
  TimeSeries current = series;
  for (int d = 0; d < 2; ++d) {
    if (d > 0) {
      if (current.size() < 2) throw DomainError("sample exhausted by differencing");
      current = difference(current, 1);
    }
    auto report = adf_test(current, spec, cvs, levels);
    report.nuisance["difference_order"] = d;
    const bool reject = !report.degenerate && report.rejects(level);
    out.steps.push_back(std::move(report));
    if (reject) {
      out.order = d == 0 ? IntegrationOrder::I0 : IntegrationOrder::I1;
      return out;
    }
  }
  out.order = IntegrationOrder::I2;
  return out;
}

/// Critical values for the EG-ADF statistic by number of I(1) regressors
/// (1..4) at the 10%, 5% and 1% levels.
inline constexpr double kEngleGrangerTable[4][3] = {
    {-3.12, -3.41, -3.96},
    {-3.52, -3.80, -4.36},
    {-3.84, -4.16, -4.73},
    {-4.20, -4.49, -5.07},
};

inline constexpr const char* kEngleGrangerTableName = "EG-ADF critical values, 1-4 regressors";

[[nodiscard]] inline CriticalValues engle_granger_critical_values(std::size_t n_regressors) {
  if (n_regressors < 1 || n_regressors > 4) {
    throw DomainError("EG-ADF critical values are tabulated for 1 to 4 regressors, not " +
                      std::to_string(n_regressors));
  }
  const auto& row = kEngleGrangerTable[n_regressors - 1];
  CriticalValues cv;
  cv.tail = Tail::left;
  cv.by_level = {{0.10, row[0]}, {0.05, row[1]}, {0.01, row[2]}};
  cv.provenance = provenance::PublishedTable{kEngleGrangerTableName};
  return cv;
}

struct EngleGrangerRegression {
  OlsFit first_stage;
  TimeSeries residuals{std::vector<double>{0.0}};
  AdfRegression adf;
  bool degenerate = false;
};

[[nodiscard]] inline std::vector<std::string> regressor_names(const std::vector<TimeSeries>& xs) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < xs.size(); ++i) names.push_back(xs[i].label().value_or("x" + std::to_string(i + 1)));
  return names;
}

/// Y followed by the X's; clashing labels fall back to positional names.
[[nodiscard]] inline MultiSeries regression_data(const TimeSeries& y, const std::vector<TimeSeries>& xs) {
  MultiSeries data;
  data.add(y.relabeled(y.label().value_or("y")));
  const auto names = regressor_names(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::string name = names[i];
    if (data.contains(name)) name = "x" + std::to_string(i + 1);
    while (data.contains(name)) name += "_";
    data.add(xs[i].relabeled(name));
  }
  return data;
}

/// Step one: OLS of Y on an intercept and the levels of each X. Step two: ADF
/// without deterministic terms on the residuals.
[[nodiscard]] inline EngleGrangerRegression engle_granger_regression(const TimeSeries& y,
                                                                     const std::vector<TimeSeries>& xs,
                                                                     const LagPolicy& lags) {
  if (xs.empty()) throw DomainError("cointegrating regression needs at least one regressor");
  const auto data = regression_data(y, xs);
  const auto names = data.names();
  DesignSpec spec{term::Lag{names[0], 0}, {term::Intercept{}}, {}, {}};
  for (std::size_t i = 1; i < names.size(); ++i) spec.regressors.emplace_back(term::Lag{names[i], 0});

  EngleGrangerRegression out;
  out.first_stage = solve_ols(build_design(spec, data));
  const auto& u = out.first_stage.residuals;
  out.residuals = TimeSeries(std::vector<double>(u.data(), u.data() + u.size()), "z", y.first_period());
  double scale = 0.0;
  for (double v : y.values()) scale = std::max(scale, std::abs(v));
  out.degenerate = !(out.first_stage.ser > 1e-12 * std::max(scale, 1e-300));
  if (!out.degenerate) {
    out.adf = adf_regression(out.residuals, AdfSpec{lags, Deterministic::none});
  }
  return out;
}

struct CointFit {
  std::vector<double> theta;
  double alpha = 0.0;
  TimeSeries residual_series{std::vector<double>{0.0}};
  TestReport eg_adf;
  std::size_t n_regressors = 0;
  OlsFit first_stage;
};

[[nodiscard]] inline CointFit eg_adf_test(const TimeSeries& y, const std::vector<TimeSeries>& xs,
                                          const std::vector<double>& levels = kDefaultLevels,
                                          const LagPolicy& lags = LagPolicy::bic()) {
  if (xs.empty() || xs.size() > 4) {
    throw DomainError("unsupported: EG-ADF needs 1 to 4 regressors (critical values exist only for those), got " +
                      std::to_string(xs.size()));
  }
  const auto cvs = engle_granger_critical_values(xs.size());
  const auto reg = engle_granger_regression(y, xs, lags);

  CointFit out;
  out.n_regressors = xs.size();
  out.alpha = reg.first_stage.coefficients(0);
  for (std::size_t i = 0; i < xs.size(); ++i) out.theta.push_back(reg.first_stage.coefficients(static_cast<Eigen::Index>(i + 1)));
  out.residual_series = reg.residuals;
  out.first_stage = reg.first_stage;

  TestReport& r = out.eg_adf;
  r.name = "eg_adf";
  r.distribution = "EG-ADF t (nonstandard, " + std::to_string(xs.size()) + " regressor" + (xs.size() > 1 ? "s" : "") + ")";
  r.nuisance["n_regressors"] = static_cast<double>(xs.size());
  if (reg.degenerate) {
    r.degenerate = true;
    r.statistic = std::numeric_limits<double>::quiet_NaN();
    r.notes.push_back("first-stage residuals are identically zero: exact linear relation, ADF step skipped");
  } else {
    r.statistic = reg.adf.statistic;
    r.degenerate = reg.adf.degenerate;
    r.nuisance["delta"] = reg.adf.delta;
    r.nuisance["lags"] = static_cast<double>(reg.adf.lags);
    r.nuisance["n_obs"] = static_cast<double>(reg.adf.n_obs);
  }
  apply_critical_values(r, cvs, levels);
  return out;
}

/// Form of the lead/lag terms in the DOLS regression.
enum class DolsTerms {
  /// Delta X_{t-j}, j = -p..p
  differences,
  /// X_{t-j}, j = -p..p excluding j = 0 (which duplicates the level term)
  levels,
  /// no lead/lag terms: the static regression on the DOLS sample
  none,
};

struct DolsFit {
  std::vector<double> theta;
  double intercept = 0.0;
  /// deltas[i][j + p] is the coefficient on regressor i at offset j
  std::vector<std::vector<double>> deltas;
  std::size_t p = 0;
  DolsTerms terms = DolsTerms::differences;
  OlsFit fit;
};

/// Y on an intercept, the level of each X and leads/lags of each X. The
/// sample is the common window on which every term exists.
[[nodiscard]] inline DolsFit dols(const TimeSeries& y, const std::vector<TimeSeries>& xs, std::size_t p,
                                  DolsTerms terms = DolsTerms::differences) {
  if (xs.empty()) throw DomainError("DOLS needs at least one regressor");
  const auto data = regression_data(y, xs);
  const auto names = data.names();
  const auto pp = static_cast<int>(p);
  if (y.size() <= 2 * p + 2) throw DomainError("lead/lag window too large for the sample");

  DesignSpec spec{term::Lag{names[0], 0}, {term::Intercept{}}, {}, {}};
  for (std::size_t i = 1; i < names.size(); ++i) spec.regressors.emplace_back(term::Lag{names[i], 0});
  MultiSeries augmented = data;
  if (terms == DolsTerms::differences) {
    for (std::size_t i = 1; i < names.size(); ++i)
      for (int j = -pp; j <= pp; ++j) spec.regressors.emplace_back(term::DiffLag{names[i], j});
  } else if (terms == DolsTerms::levels) {
    // Leads enter as forward-shifted copies; the tail they cannot cover is cut by end_row.
    for (std::size_t i = 1; i < names.size(); ++i) {
      const auto src = data.at(names[i]).values();
      for (int j = -pp; j <= pp; ++j) {
        if (j == 0) continue;
        if (j > 0) {
          spec.regressors.emplace_back(term::Lag{names[i], j});
          continue;
        }
        const auto shift = static_cast<std::size_t>(-j);
        const std::string lead_name = names[i] + ".F" + std::to_string(-j);
        std::vector<double> shifted(src.size(), 0.0);
        for (std::size_t t = 0; t + shift < src.size(); ++t) shifted[t] = src[t + shift];
        augmented.add(TimeSeries(std::move(shifted), lead_name, data.first_period()));
        spec.regressors.emplace_back(term::Lag{lead_name, 0});
      }
    }
    spec.end_row = data.length() - p;
  }
  if (terms == DolsTerms::none) {
    spec.first_row = p + 1;
    spec.end_row = data.length() - p;
  }

  DolsFit out;
  out.p = p;
  out.terms = terms;
  out.fit = solve_ols(build_design(spec, augmented));
  out.intercept = out.fit.coefficients(0);
  const std::size_t m = xs.size();
  for (std::size_t i = 0; i < m; ++i) out.theta.push_back(out.fit.coefficients(static_cast<Eigen::Index>(1 + i)));
  if (terms != DolsTerms::none) {
    const std::size_t per = terms == DolsTerms::differences ? 2 * p + 1 : 2 * p;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> d;
      for (std::size_t j = 0; j < per; ++j) {
        d.push_back(out.fit.coefficients(static_cast<Eigen::Index>(1 + m + i * per + j)));
      }
      if (terms == DolsTerms::levels) d.insert(d.begin() + static_cast<std::ptrdiff_t>(p), 0.0);
      out.deltas.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace tsecon
