#pragma once

/// Scalar autoregressions: estimation, lag-polynomial roots, closed-form
/// AR(1) and MA(q) moments, iterated forecasts and out-of-sample RMSFE.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"

namespace tsecon {

/// Coefficients of 1 - b_1 z - ... - b_p z^p.
class LagPolynomial {
 public:
  explicit LagPolynomial(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    while (!coefficients_.empty() && coefficients_.back() == 0.0) coefficients_.pop_back();
    if (coefficients_.empty()) throw DomainError("lag polynomial needs at least one nonzero coefficient");
  }

  [[nodiscard]] std::size_t degree() const noexcept { return coefficients_.size(); }
  [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  /// Roots of 1 - sum b_i z^i, as reciprocals of the companion eigenvalues.
  [[nodiscard]] std::vector<std::complex<double>> roots() const {
    const auto p = static_cast<Eigen::Index>(coefficients_.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = coefficients_[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    const Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    std::vector<std::complex<double>> out;
    for (Eigen::Index i = 0; i < p; ++i) out.push_back(1.0 / es.eigenvalues()(i));
    return out;
  }

 private:
  std::vector<double> coefficients_;
};

struct RootReport {
  bool stationary = false;
  bool unit_root = false;
  /// ascending
  std::vector<double> root_moduli;
};

/// Diagnostic band around modulus one for exact-coefficient queries.
inline constexpr double kUnitRootTolerance = 1e-8;

[[nodiscard]] inline RootReport is_stationary(const LagPolynomial& poly, double tol = kUnitRootTolerance) {
  RootReport r;
  for (const auto& z : poly.roots()) r.root_moduli.push_back(std::abs(z));
  std::sort(r.root_moduli.begin(), r.root_moduli.end());
  r.stationary = std::all_of(r.root_moduli.begin(), r.root_moduli.end(), [&](double m) { return m > 1.0 + tol; });
  r.unit_root = std::any_of(r.root_moduli.begin(), r.root_moduli.end(),
                            [&](double m) { return m >= 1.0 - tol && m <= 1.0 + tol; });
  return r;
}

/// Intercept and slopes of an autoregression, estimated or supplied.
struct ArCoefficients {
  double intercept = 0.0;
  std::vector<double> betas;
};

struct ArFit {
  double intercept = 0.0;
  std::vector<double> betas;
  OlsFit fit;
  std::size_t order = 0;

  [[nodiscard]] LagPolynomial lag_poly() const { return LagPolynomial(betas); }
  [[nodiscard]] ArCoefficients coefficients() const { return {intercept, betas}; }
};

/// Regression of `name` on an intercept and lags 1..p.
[[nodiscard]] inline DesignSpec ar_design(const std::string& name, std::size_t p,
                                          std::optional<std::size_t> first_row = std::nullopt) {
  DesignSpec spec{term::Lag{name, 0}, {term::Intercept{}}, first_row, std::nullopt};
  for (std::size_t j = 1; j <= p; ++j) spec.regressors.emplace_back(term::Lag{name, static_cast<int>(j)});
  return spec;
}

[[nodiscard]] inline ArFit ar_fit_from_ols(OlsFit ols, std::size_t p) {
  ArFit out;
  out.order = p;
  out.intercept = ols.coefficients(0);
  for (std::size_t j = 1; j <= p; ++j) out.betas.push_back(ols.coefficients(static_cast<Eigen::Index>(j)));
  out.fit = std::move(ols);
  return out;
}

[[nodiscard]] inline ArFit fit_ar(const TimeSeries& series, std::size_t p) {
  if (p == 0) throw DomainError("AR order must be at least 1");
  if (series.size() <= 2 * (p + 1)) {
    throw DomainError("insufficient sample: AR(" + std::to_string(p) + ") needs more than " +
                      std::to_string(2 * (p + 1)) + " observations");
  }
  const auto data = as_collection(series);
  return ar_fit_from_ols(solve_ols(build_design(ar_design(series.name(), p), data)), p);
}

struct Ar1Moments {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double sigma2 = 0.0;
  double mean = 0.0;
  double variance = 0.0;

  /// beta1^tau sigma2 / (1 - beta1^2)
  [[nodiscard]] double autocovariance(std::size_t tau) const {
    return std::pow(beta1, static_cast<double>(tau)) * variance;
  }
};

[[nodiscard]] inline Ar1Moments ar1_moments(double beta0, double beta1, double sigma2) {
  if (!(std::abs(beta1) < 1.0)) throw DomainError("nonstationary: moments undefined for |beta1| >= 1");
  if (!(sigma2 > 0.0)) throw DomainError("innovation variance must be positive");
  return {beta0, beta1, sigma2, beta0 / (1.0 - beta1), sigma2 / (1.0 - beta1 * beta1)};
}

/// Y_t = alpha0 + u_t - alpha_1 u_{t-1} - ... - alpha_q u_{t-q}
struct MaMoments {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> alphas;
  double sigma2 = 0.0;

  /// sigma2 (-alpha_tau + sum_{j=1}^{q-tau} alpha_j alpha_{j+tau}); zero beyond q.
  [[nodiscard]] double autocovariance(std::size_t tau) const {
    if (tau == 0) return variance;
    const std::size_t q = alphas.size();
    if (tau > q) return 0.0;
    double acc = -alphas[tau - 1];
    for (std::size_t j = 1; j + tau <= q; ++j) acc += alphas[j - 1] * alphas[j + tau - 1];
    return sigma2 * acc;
  }
};

[[nodiscard]] inline MaMoments ma_moments(double alpha0, std::vector<double> alphas, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("innovation variance must be positive");
  double ss = 1.0;
  for (double a : alphas) ss += a * a;
  return {alpha0, ss * sigma2, std::move(alphas), sigma2};
}

struct ForecastResult {
  std::vector<double> point_forecasts;
  /// Horizon-one figure (the SER) at every horizon; no multi-step formula is used.
  double rmsfe_estimate = 0.0;
  std::size_t horizon = 0;
};

/// Iterated forecasts, forecasts substituting for unrealized values.
[[nodiscard]] inline std::vector<double> iterate_ar_forecasts(const ArCoefficients& c, std::span<const double> history,
                                                              std::size_t horizon) {
  const std::size_t p = c.betas.size();
  if (horizon < 1) throw DomainError("forecast horizon must be at least 1");
  if (history.size() < p) throw DomainError("history shorter than the AR order");
  std::vector<double> path(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
  std::vector<double> out;
  out.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    double acc = c.intercept;
    for (std::size_t j = 1; j <= p; ++j) acc += c.betas[j - 1] * path[path.size() - j];
    out.push_back(acc);
    path.push_back(acc);
  }
  return out;
}

[[nodiscard]] inline ForecastResult forecast_ar(const ArFit& fit, const TimeSeries& history, std::size_t horizon) {
  ForecastResult r;
  r.point_forecasts = iterate_ar_forecasts(fit.coefficients(), history.values(), horizon);
  r.rmsfe_estimate = fit.fit.ser;
  r.horizon = horizon;
  return r;
}

/// Same recursion with supplied (e.g. true) coefficients; rmsfe is sqrt(sigma2).
[[nodiscard]] inline ForecastResult forecast_ar(const ArCoefficients& c, const TimeSeries& history, std::size_t horizon,
                                                double sigma2 = 0.0) {
  ForecastResult r;
  r.point_forecasts = iterate_ar_forecasts(c, history.values(), horizon);
  r.rmsfe_estimate = std::sqrt(std::max(sigma2, 0.0));
  r.horizon = horizon;
  return r;
}

/// Expanding-window re-estimation after the split, one-step forecasts, root
/// mean squared forecast error over the held-out window.
[[nodiscard]] inline double pseudo_out_of_sample_rmsfe(const TimeSeries& series, std::size_t p, double split) {
  if (p == 0) throw DomainError("AR order must be at least 1");
  if (!(split > 0.0 && split < 1.0)) throw DomainError("degenerate split: fraction must lie in (0, 1)");
  const std::size_t n = series.size();
  const auto n0 = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
  if (n0 <= 2 * (p + 1) || n - n0 < 2 * (p + 1)) {
    throw DomainError("degenerate split: each side needs at least " + std::to_string(2 * (p + 1)) +
                      " observations (estimation side more than that)");
  }
  auto values = series.values();
  double sse = 0.0;
  for (std::size_t t = n0; t < n; ++t) {
    const TimeSeries train(std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(t)),
                           series.label(), series.origin());
    const auto fit = fit_ar(train, p);
    const double f = iterate_ar_forecasts(fit.coefficients(), train.values(), 1).front();
    sse += (values[t] - f) * (values[t] - f);
  }
  return std::sqrt(sse / static_cast<double>(n - n0));
}

}  // namespace tsecon
