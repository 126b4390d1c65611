#pragma once

/// Vector autoregressions: equation-by-equation OLS, companion-form stability,
/// population autocovariances, iterated forecasts and Granger causality.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tsecon/ar.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"
#include "tsecon/test_report.hpp"

namespace tsecon {

/// Z_t = delta + A_1 Z_{t-1} + ... + A_p Z_{t-p} + U_t with E[U U'] = sigma.
struct VarParams {
  Eigen::VectorXd delta;
  std::vector<Eigen::MatrixXd> A;
  Eigen::MatrixXd sigma;

  [[nodiscard]] std::size_t k() const noexcept { return static_cast<std::size_t>(delta.size()); }
  [[nodiscard]] std::size_t p() const noexcept { return A.size(); }

  void validate() const {
    const auto kk = delta.size();
    if (kk == 0) throw DomainError("VAR needs at least one variable");
    if (A.empty()) throw DomainError("VAR needs at least one lag matrix");
    for (const auto& a : A)
      if (a.rows() != kk || a.cols() != kk) throw DomainError("VAR coefficient matrices must be k x k");
    if (sigma.rows() != kk || sigma.cols() != kk) throw DomainError("innovation covariance must be k x k");
  }
};

/// kp x kp companion matrix [A_1 ... A_p; I 0].
[[nodiscard]] inline Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& A) {
  const auto k = A.front().rows();
  const auto p = static_cast<Eigen::Index>(A.size());
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(k * p, k * p);
  for (Eigen::Index j = 0; j < p; ++j) F.block(0, j * k, k, k) = A[static_cast<std::size_t>(j)];
  if (p > 1) F.block(k, 0, k * (p - 1), k * (p - 1)).setIdentity();
  return F;
}

struct VarFit {
  std::size_t k = 0;
  std::size_t p = 0;
  std::vector<std::string> names;
  Eigen::VectorXd intercepts;
  std::vector<Eigen::MatrixXd> coefficient_matrices;
  /// (1/T) sum u_t u_t' over the effective sample
  Eigen::MatrixXd residual_cov;
  std::vector<OlsFit> per_equation_fits;

  [[nodiscard]] VarParams params() const { return {intercepts, coefficient_matrices, residual_cov}; }
};

/// Shared regressor list: intercept, then lags 1..p of each variable in turn.
[[nodiscard]] inline std::vector<Term> var_regressors(const std::vector<std::string>& names, std::size_t p) {
  std::vector<Term> regs{term::Intercept{}};
  for (const auto& n : names)
    for (std::size_t j = 1; j <= p; ++j) regs.emplace_back(term::Lag{n, static_cast<int>(j)});
  return regs;
}

[[nodiscard]] inline Eigen::MatrixXd residual_covariance(const std::vector<OlsFit>& fits) {
  const auto k = static_cast<Eigen::Index>(fits.size());
  const auto n = fits.front().residuals.size();
  Eigen::MatrixXd U(n, k);
  for (Eigen::Index i = 0; i < k; ++i) U.col(i) = fits[static_cast<std::size_t>(i)].residuals;
  return (U.transpose() * U) / static_cast<double>(n);
}

[[nodiscard]] inline VarFit fit_var(const MultiSeries& data, std::size_t p,
                                    std::optional<std::size_t> first_row = std::nullopt) {
  const std::size_t k = data.width();
  if (k == 0) throw DomainError("VAR needs at least one series");
  if (p == 0) throw DomainError("VAR order must be at least 1");
  if (!(k * p + 1 < data.length())) {
    throw DomainError("sample bound violated: k*p + 1 = " + std::to_string(k * p + 1) + " must be below T = " +
                      std::to_string(data.length()));
  }
  VarFit out;
  out.k = k;
  out.p = p;
  out.names = data.names();
  const auto regs = var_regressors(out.names, p);
  for (const auto& n : out.names) {
    out.per_equation_fits.push_back(solve_ols(build_design(DesignSpec{term::Lag{n, 0}, regs, first_row, {}}, data)));
  }
  const auto kk = static_cast<Eigen::Index>(k);
  out.intercepts.resize(kk);
  out.coefficient_matrices.assign(p, Eigen::MatrixXd::Zero(kk, kk));
  for (Eigen::Index i = 0; i < kk; ++i) {
    const auto& b = out.per_equation_fits[static_cast<std::size_t>(i)].coefficients;
    out.intercepts(i) = b(0);
    for (Eigen::Index l = 0; l < kk; ++l)
      for (std::size_t j = 1; j <= p; ++j)
        out.coefficient_matrices[j - 1](i, l) = b(1 + l * static_cast<Eigen::Index>(p) + static_cast<Eigen::Index>(j) - 1);
  }
  out.residual_cov = residual_covariance(out.per_equation_fits);
  return out;
}

struct StabilityReport {
  bool stable = false;
  /// companion eigenvalue moduli, ascending
  std::vector<double> root_moduli;
};

[[nodiscard]] inline StabilityReport stability(const std::vector<Eigen::MatrixXd>& A, double tol = kUnitRootTolerance) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(A), false);
  StabilityReport r;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r.root_moduli.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(r.root_moduli.begin(), r.root_moduli.end());
  r.stable = r.root_moduli.back() < 1.0 - tol;
  return r;
}

[[nodiscard]] inline StabilityReport stability(const VarFit& fit) { return stability(fit.coefficient_matrices); }

struct VarAutocovariances {
  /// gammas[tau] = E[(Z_t - mu)(Z_{t-tau} - mu)']
  std::vector<Eigen::MatrixXd> gammas;
};

/// Gamma(0..p-1) from the companion-form Lyapunov equation
/// vec(S) = (I - F (x) F)^{-1} vec(Q), then Gamma(tau) = sum_i A_i Gamma(tau - i).
[[nodiscard]] inline VarAutocovariances var_autocovariances(const VarParams& params, std::size_t tau_max) {
  params.validate();
  if (!stability(params.A).stable) throw DomainError("unstable parameters: autocovariances undefined");
  const auto k = static_cast<Eigen::Index>(params.k());
  const auto p = static_cast<Eigen::Index>(params.p());
  const auto m = k * p;
  const Eigen::MatrixXd F = companion_matrix(params.A);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  Q.topLeftCorner(k, k) = params.sigma;

  Eigen::MatrixXd kron(m * m, m * m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) kron.block(i * m, j * m, m, m) = F(i, j) * F;
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m * m, m * m) - kron;
  const Eigen::VectorXd vecQ = Eigen::Map<const Eigen::VectorXd>(Q.data(), m * m);
  const Eigen::VectorXd vecS = lhs.partialPivLu().solve(vecQ);
  Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(vecS.data(), m, m);
  S = 0.5 * (S + S.transpose()).eval();

  VarAutocovariances out;
  for (Eigen::Index j = 0; j < p && j <= static_cast<Eigen::Index>(tau_max); ++j) {
    out.gammas.push_back(S.block(0, j * k, k, k));
  }
  for (auto tau = static_cast<std::size_t>(p); tau <= tau_max; ++tau) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 1; i <= params.p(); ++i) g += params.A[i - 1] * out.gammas[tau - i];
    out.gammas.push_back(g);
  }
  return out;
}

[[nodiscard]] inline VarAutocovariances var_autocovariances(const VarFit& fit, std::size_t tau_max) {
  return var_autocovariances(fit.params(), tau_max);
}

/// One ForecastResult per equation, in the fit's variable order.
[[nodiscard]] inline std::vector<ForecastResult> forecast_var(const VarFit& fit, const MultiSeries& history,
                                                              std::size_t horizon) {
  if (horizon < 1) throw DomainError("forecast horizon must be at least 1");
  const std::size_t k = fit.k;
  const std::size_t p = fit.p;
  std::vector<std::vector<double>> paths;
  for (const auto& n : fit.names) {
    const auto& s = history.at(n);
    if (s.size() < p) throw DomainError("history shorter than the VAR order");
    auto v = s.values();
    paths.emplace_back(v.end() - static_cast<std::ptrdiff_t>(p), v.end());
  }
  std::vector<ForecastResult> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i].horizon = horizon;
    out[i].rmsfe_estimate = fit.per_equation_fits[i].ser;
  }
  std::vector<double> step(k);
  for (std::size_t h = 0; h < horizon; ++h) {
    for (std::size_t i = 0; i < k; ++i) {
      double acc = fit.intercepts(static_cast<Eigen::Index>(i));
      for (std::size_t l = 0; l < k; ++l) {
        const auto& path = paths[l];
        for (std::size_t j = 1; j <= p; ++j) {
          acc += fit.coefficient_matrices[j - 1](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) *
                 path[path.size() - j];
        }
      }
      step[i] = acc;
    }
    for (std::size_t i = 0; i < k; ++i) {
      paths[i].push_back(step[i]);
      out[i].point_forecasts.push_back(step[i]);
    }
  }
  return out;
}

/// F test of H0: the p lags of `cause` have zero coefficients in the `effect`
/// equation of the bivariate VAR(p).
[[nodiscard]] inline TestReport granger_test(const MultiSeries& data, const std::string& cause,
                                             const std::string& effect, std::size_t p,
                                             const std::vector<double>& levels = kDefaultLevels) {
  if (p == 0) throw DomainError("Granger test needs p >= 1");
  if (cause == effect) throw DomainError("cause and effect must be different series");
  const auto pair = data.select({effect, cause});
  if (!(2 * p + 1 < pair.length())) throw DomainError("sample bound violated for Granger test");

  const auto unrestricted_regs = var_regressors({effect, cause}, p);
  const auto restricted_regs = var_regressors({effect}, p);
  const std::optional<std::size_t> start = p;
  const auto unrestricted = solve_ols(build_design(DesignSpec{term::Lag{effect, 0}, unrestricted_regs, start, {}}, pair));
  const auto restricted = solve_ols(build_design(DesignSpec{term::Lag{effect, 0}, restricted_regs, start, {}}, pair));
  const auto f = f_statistic(restricted, unrestricted, p);

  TestReport r;
  r.name = "granger";
  r.statistic = f.value;
  r.distribution = "F(" + std::to_string(f.df_num) + ", " + std::to_string(f.df_den) + ")";
  r.nuisance["p"] = static_cast<double>(p);
  r.nuisance["ssr_restricted"] = restricted.ssr;
  r.nuisance["ssr_unrestricted"] = unrestricted.ssr;
  r.nuisance["n_obs"] = static_cast<double>(unrestricted.n_obs);
  apply_critical_values(r, f_critical_values(f.df_num, f.df_den, levels), levels);
  r.p_value = f_p_value(f.value, f.df_num, f.df_den);
  r.notes.push_back("H0: " + cause + " does not Granger-cause " + effect);
  return r;
}

}  // namespace tsecon
