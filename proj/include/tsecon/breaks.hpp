#pragma once

/// Structural-break tests for AR(p) regressions: Chow F at a known date and
/// the QLR (sup-F) statistic over a trimmed range of dates.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsecon/ar.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"
#include "tsecon/test_report.hpp"

namespace tsecon {

struct ChowStatistic {
  FStatistic f;
  double ssr_restricted = 0.0;
  double ssr_unrestricted = 0.0;
  std::size_t pre_rows = 0;
  std::size_t post_rows = 0;
};

/// AR(p) design augmented with D_t(tau) and D_t(tau) x Y_{t-j}, j = 1..p.
[[nodiscard]] inline DesignSpec break_design(const std::string& name, std::size_t p, std::int64_t tau,
                                             bool ones_through_tau = true) {
  auto spec = ar_design(name, p);
  const term::BreakDummy d{tau, ones_through_tau};
  spec.regressors.emplace_back(d);
  for (std::size_t j = 1; j <= p; ++j)
    spec.regressors.emplace_back(term::Interaction{d, term::Lag{name, static_cast<int>(j)}});
  return spec;
}

/// Chow F comparing the dummy-augmented regression to the plain AR(p).
/// `tau` is a period of the series' time index; D = 1 for t <= tau.
[[nodiscard]] inline ChowStatistic chow_statistic(const TimeSeries& series, std::size_t p, std::int64_t tau,
                                                  bool ones_through_tau = true) {
  const auto data = as_collection(series);
  const auto name = series.name();
  const auto unrestricted_design = build_design(break_design(name, p, tau, ones_through_tau), data);

  ChowStatistic out;
  for (std::size_t r = 0; r < unrestricted_design.rows(); ++r) {
    if (unrestricted_design.first_period + static_cast<std::int64_t>(r) <= tau) {
      ++out.pre_rows;
    } else {
      ++out.post_rows;
    }
  }
  if (out.pre_rows < p + 2 || out.post_rows < p + 2) {
    throw DomainError("regime too short: each side of the break needs at least " + std::to_string(p + 2) +
                      " observations (have " + std::to_string(out.pre_rows) + " and " +
                      std::to_string(out.post_rows) + ")");
  }
  const auto unrestricted = solve_ols(unrestricted_design);
  const auto restricted = solve_ols(build_design(ar_design(name, p), data));
  out.f = f_statistic(restricted, unrestricted, p + 1);
  out.ssr_restricted = restricted.ssr;
  out.ssr_unrestricted = unrestricted.ssr;
  return out;
}

[[nodiscard]] inline TestReport chow_test(const TimeSeries& series, std::size_t p, std::int64_t tau,
                                          const std::vector<double>& levels = kDefaultLevels) {
  const auto c = chow_statistic(series, p, tau);
  TestReport r;
  r.name = "chow";
  r.statistic = c.f.value;
  r.distribution = "F(" + std::to_string(c.f.df_num) + ", " + std::to_string(c.f.df_den) + ")";
  r.nuisance["tau"] = static_cast<double>(tau);
  r.nuisance["p"] = static_cast<double>(p);
  r.nuisance["ssr_restricted"] = c.ssr_restricted;
  r.nuisance["ssr_unrestricted"] = c.ssr_unrestricted;
  apply_critical_values(r, f_critical_values(c.f.df_num, c.f.df_den, levels), levels);
  r.p_value = f_p_value(c.f.value, c.f.df_num, c.f.df_den);
  return r;
}

/// Default trimming fraction for the QLR date window.
inline constexpr double kDefaultQlrTrim = 0.15;

struct QlrStatistic {
  double statistic = 0.0;
  std::int64_t argmax_tau = 0;
  std::size_t df_num = 0;
  /// (tau, Chow F at tau) over the candidate window
  std::vector<std::pair<std::int64_t, double>> path;
};

/// Candidate break dates: the observation positions [ceil(trim T), floor((1-trim) T)],
/// mapped to periods, keeping only dates with p + 2 rows on each side.
[[nodiscard]] inline std::vector<std::int64_t> qlr_window(const TimeSeries& series, std::size_t p, double trim) {
  if (!(trim > 0.0 && trim < 0.5)) throw DomainError("QLR trimming fraction must lie in (0, 0.5)");
  const auto T = static_cast<double>(series.size());
  const auto lo = static_cast<std::int64_t>(std::ceil(trim * T));
  const auto hi = static_cast<std::int64_t>(std::floor((1.0 - trim) * T));
  const auto n = static_cast<std::int64_t>(series.size());
  const auto pp = static_cast<std::int64_t>(p);
  std::vector<std::int64_t> taus;
  for (std::int64_t pos = std::max<std::int64_t>(lo, 1); pos <= hi; ++pos) {
    const std::int64_t pre = pos - pp;  // rows with observation index < pos
    const std::int64_t post = (n - pp) - pre;
    if (pre >= pp + 2 && post >= pp + 2) taus.push_back(series.first_period() - 1 + pos);
  }
  if (taus.empty()) throw DomainError("QLR window empty after trimming");
  return taus;
}

/// Maximal Chow F over a set of dates. The unrestricted SSR at each date is
/// the sum of the two regime-wise AR(p) SSRs (same column space as the dummy
/// regression), accumulated from prefix cross-products in extended precision.
[[nodiscard]] inline QlrStatistic qlr_statistic(const TimeSeries& series, std::size_t p,
                                                const std::vector<std::int64_t>& taus) {
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const auto data = as_collection(series);
  const auto design = build_design(ar_design(series.name(), p), data);
  const auto restricted = solve_ols(design);
  const auto n = static_cast<Eigen::Index>(design.rows());
  const auto k = static_cast<Eigen::Index>(design.cols());

  // Centering shifts every non-intercept column by a constant, which each
  // regime's intercept absorbs; it only improves conditioning.
  Mat X = design.X.cast<long double>();
  Vec y = design.y.cast<long double>();
  for (Eigen::Index c = 1; c < k; ++c) X.col(c).array() -= X.col(c).mean();
  y.array() -= y.mean();

  std::vector<Mat> gram(static_cast<std::size_t>(n + 1), Mat::Zero(k, k));
  std::vector<Vec> xty(static_cast<std::size_t>(n + 1), Vec::Zero(k));
  std::vector<long double> yty(static_cast<std::size_t>(n + 1), 0.0L);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    gram[i + 1] = gram[i] + X.row(r).transpose() * X.row(r);
    xty[i + 1] = xty[i] + X.row(r).transpose() * y(r);
    yty[i + 1] = yty[i] + y(r) * y(r);
  }
  auto segment_ssr = [&](std::size_t a, std::size_t b) {
    const Mat G = gram[b] - gram[a];
    const Vec g = xty[b] - xty[a];
    const long double c = yty[b] - yty[a];
    const Eigen::LDLT<Mat> ldlt(G);
    if (ldlt.info() != Eigen::Success) throw DomainError("regime regression is singular");
    const Vec beta = ldlt.solve(g);
    return std::max(0.0L, c - g.dot(beta));
  };

  QlrStatistic out;
  out.df_num = static_cast<std::size_t>(k);
  const auto df_den = static_cast<double>(n - 2 * k);
  out.statistic = -1.0;
  for (const auto tau : taus) {
    const auto pre = tau - design.first_period + 1;
    if (pre < k + 1 || n - pre < k + 1) throw DomainError("regime too short at candidate date " + std::to_string(tau));
    const auto split = static_cast<std::size_t>(pre);
    const long double ssr_u = segment_ssr(0, split) + segment_ssr(split, static_cast<std::size_t>(n));
    const long double delta = std::max(0.0L, static_cast<long double>(restricted.ssr) - ssr_u);
    const double f = static_cast<double>((delta / static_cast<long double>(k)) / (ssr_u / df_den));
    out.path.emplace_back(tau, f);
    if (f > out.statistic) {
      out.statistic = f;
      out.argmax_tau = tau;
    }
  }
  return out;
}

[[nodiscard]] inline QlrStatistic qlr_statistic(const TimeSeries& series, std::size_t p,
                                                double trim = kDefaultQlrTrim) {
  return qlr_statistic(series, p, qlr_window(series, p, trim));
}

/// Right-tail test; critical values come from the Monte Carlo cache.
[[nodiscard]] inline TestReport qlr_test(const TimeSeries& series, std::size_t p, double trim,
                                         const CriticalValues& cvs,
                                         const std::vector<double>& levels = kDefaultLevels) {
  const auto q = qlr_statistic(series, p, trim);
  TestReport r;
  r.name = "qlr";
  r.statistic = q.statistic;
  r.distribution = "sup-F over trimmed dates (nonstandard, " + std::to_string(q.df_num) + " restrictions)";
  r.nuisance["argmax_tau"] = static_cast<double>(q.argmax_tau);
  r.nuisance["trim"] = trim;
  r.nuisance["p"] = static_cast<double>(p);
  r.nuisance["window_first"] = static_cast<double>(q.path.front().first);
  r.nuisance["window_last"] = static_cast<double>(q.path.back().first);
  r.statistic_path = q.path;
  if (cvs.tail != Tail::right) throw DomainError("QLR critical values must be right-tail");
  apply_critical_values(r, cvs, levels);
  return r;
}

}  // namespace tsecon
