#pragma once

/// Information-criterion lag-order selection for AR and VAR models.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tsecon/ar.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"
#include "tsecon/var.hpp"

namespace tsecon {

enum class Criterion { bic, aic };

[[nodiscard]] inline std::string to_string(Criterion c) { return c == Criterion::bic ? "BIC" : "AIC"; }

[[nodiscard]] inline double criterion_penalty(Criterion c, std::size_t n_obs) {
  return c == Criterion::bic ? std::log(static_cast<double>(n_obs)) : 2.0;
}

/// ln(SSR / T) + n_params * penalty / T
[[nodiscard]] inline double information_criterion(Criterion c, double ssr, std::size_t n_obs, std::size_t n_params) {
  const auto T = static_cast<double>(n_obs);
  return std::log(ssr / T) + static_cast<double>(n_params) * criterion_penalty(c, n_obs) / T;
}

struct CriterionRow {
  std::size_t p = 0;
  double value = 0.0;
  /// SSR for scalar tables, ln det(Sigma_uu) for VAR tables
  double fit_measure = 0.0;
};

struct CriterionTable {
  Criterion criterion = Criterion::bic;
  std::vector<CriterionRow> rows;
  std::size_t chosen_p = 0;
  std::size_t n_obs = 0;
};

namespace detail {
inline void choose_minimum(CriterionTable& t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : t.rows) {
    if (r.value < best) {  // strict: ties stay with the smaller p
      best = r.value;
      t.chosen_p = r.p;
    }
  }
}
}  // namespace detail

/// Orders 0..p_max, all fit on the common sample that drops the first p_max
/// observations; p = 0 is the intercept-only model.
[[nodiscard]] inline CriterionTable select_ar_order(const TimeSeries& series, std::size_t p_max, Criterion criterion) {
  if (series.size() <= 2 * p_max + 2) {
    throw DomainError("p_max " + std::to_string(p_max) + " too large for a sample of " +
                      std::to_string(series.size()));
  }
  const auto data = as_collection(series);
  CriterionTable t;
  t.criterion = criterion;
  for (std::size_t p = 0; p <= p_max; ++p) {
    const auto fit = solve_ols(build_design(ar_design(series.name(), p, p_max), data));
    t.n_obs = fit.n_obs;
    t.rows.push_back({p, information_criterion(criterion, fit.ssr, fit.n_obs, p + 1), fit.ssr});
  }
  detail::choose_minimum(t);
  return t;
}

/// ln det(Sigma_uu) + k (k p + 1) penalty / T on the common sample.
[[nodiscard]] inline CriterionTable select_var_order(const MultiSeries& data, std::size_t p_max, Criterion criterion) {
  const std::size_t k = data.width();
  if (k == 0) throw DomainError("VAR lag selection needs at least one series");
  if (!(k * p_max + 1 < data.length())) {
    throw DomainError("sample bound violated: k*p_max + 1 = " + std::to_string(k * p_max + 1) +
                      " must be below T = " + std::to_string(data.length()));
  }
  if (data.length() - p_max <= k * p_max + 1) {
    throw DomainError("p_max too large: common sample cannot identify the largest VAR");
  }
  const auto names = data.names();
  CriterionTable t;
  t.criterion = criterion;
  for (std::size_t p = 0; p <= p_max; ++p) {
    const auto regs = var_regressors(names, p);
    std::vector<OlsFit> fits;
    for (const auto& n : names) {
      fits.push_back(solve_ols(build_design(DesignSpec{term::Lag{n, 0}, regs, p_max, {}}, data)));
    }
    const Eigen::MatrixXd sigma = residual_covariance(fits);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
    const Eigen::VectorXd d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-14 * std::max(sigma.diagonal().maxCoeff(), 1e-300)) {
      Eigen::Index worst = 0;
      sigma.diagonal().minCoeff(&worst);
      throw DomainError("singular residual covariance at p = " + std::to_string(p) + "; degenerate equation: " +
                        names[static_cast<std::size_t>(worst)]);
    }
    const double logdet = d.array().log().sum();
    const std::size_t n = fits.front().n_obs;
    t.n_obs = n;
    const double value = logdet + static_cast<double>(k * (k * p + 1)) * criterion_penalty(criterion, n) /
                                      static_cast<double>(n);
    t.rows.push_back({p, value, logdet});
  }
  detail::choose_minimum(t);
  return t;
}

}  // namespace tsecon
