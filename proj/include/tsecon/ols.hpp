#pragma once

/// Least squares on lag-structured designs: the numerical kernel behind every
/// model and test in the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/series.hpp"

namespace tsecon {

namespace term {

struct Intercept {};

/// Deterministic linear trend: the period index t.
struct Trend {};

/// Level Y_{t-lag}; lag 0 is the contemporaneous value.
struct Lag {
  std::string series;
  int lag = 0;
};

/// First difference Delta Y_{t-lag}; negative lag is a lead.
struct DiffLag {
  std::string series;
  int lag = 0;
};

/// Break indicator. With ones_through_tau, D_t = 1 for t <= tau and 0 after;
/// otherwise the polarity is reversed.
struct BreakDummy {
  std::int64_t tau = 0;
  bool ones_through_tau = true;
};

struct Interaction {
  BreakDummy dummy;
  std::variant<Lag, DiffLag> inner;
};

}  // namespace term

using Term = std::variant<term::Intercept, term::Trend, term::Lag, term::DiffLag, term::BreakDummy, term::Interaction>;

struct DesignSpec {
  Term dependent;
  std::vector<Term> regressors;
  /// Optional clamp on the row window (indices into the data), used to force
  /// a common estimation sample across nested models.
  std::optional<std::size_t> first_row;
  std::optional<std::size_t> end_row;
};

/// Dense regression problem produced from a DesignSpec.
struct Design {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> column_names;
  /// Index (into the data) of the first row, and its period.
  std::size_t first_row = 0;
  std::int64_t first_period = 1;

  [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
  [[nodiscard]] std::size_t cols() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

namespace detail {

struct TermWindow {
  std::int64_t lo;  // first row index (inclusive) where the term is defined
  std::int64_t hi;  // last row index (inclusive)
};

inline std::string term_name(const Term& t) {
  struct Visitor {
    std::string operator()(const term::Intercept&) const { return "const"; }
    std::string operator()(const term::Trend&) const { return "trend"; }
    std::string operator()(const term::Lag& l) const {
      return l.lag == 0 ? l.series : l.series + ".L" + std::to_string(l.lag);
    }
    std::string operator()(const term::DiffLag& d) const {
      if (d.lag == 0) return "d." + d.series;
      if (d.lag > 0) return "d." + d.series + ".L" + std::to_string(d.lag);
      return "d." + d.series + ".F" + std::to_string(-d.lag);
    }
    std::string operator()(const term::BreakDummy& b) const {
      return std::string(b.ones_through_tau ? "D" : "Dpost") + "(" + std::to_string(b.tau) + ")";
    }
    std::string operator()(const term::Interaction& i) const {
      return (*this)(i.dummy) + "*" + std::visit(*this, i.inner);
    }
  };
  return std::visit(Visitor{}, t);
}

// A term resolved against a data set: series lookups are done once.
class ResolvedTerm {
 public:
  ResolvedTerm(const Term& t, const MultiSeries& data)
      : n_(static_cast<std::int64_t>(data.length())), first_period_(data.first_period()) {
    std::visit([&](const auto& x) { resolve(x, data); }, t);
  }

  [[nodiscard]] TermWindow window() const { return window_; }

  [[nodiscard]] double value(std::int64_t i) const {
    double v = 1.0;
    switch (kind_) {
      case Kind::constant: v = 1.0; break;
      case Kind::trend: v = static_cast<double>(first_period_ + i); break;
      case Kind::level: v = values_[static_cast<std::size_t>(i - lag_)]; break;
      case Kind::diff: {
        const auto k = static_cast<std::size_t>(i - lag_);
        v = values_[k] - values_[k - 1];
        break;
      }
    }
    if (dummy_) {
      const bool before = first_period_ + i <= dummy_->tau;
      if (before != dummy_->ones_through_tau) return 0.0;
    }
    return v;
  }

 private:
  enum class Kind { constant, trend, level, diff };

  void resolve(const term::Intercept&, const MultiSeries&) { window_ = {0, n_ - 1}; }
  void resolve(const term::Trend&, const MultiSeries&) {
    kind_ = Kind::trend;
    window_ = {0, n_ - 1};
  }
  void resolve(const term::BreakDummy& b, const MultiSeries&) {
    dummy_ = b;
    window_ = {0, n_ - 1};
  }
  void resolve(const term::Lag& l, const MultiSeries& data) {
    if (l.lag < 0) throw DomainError("lag order must be nonnegative");
    kind_ = Kind::level;
    values_ = data.at(l.series).values();
    lag_ = l.lag;
    window_ = {l.lag, n_ - 1};
  }
  void resolve(const term::DiffLag& d, const MultiSeries& data) {
    kind_ = Kind::diff;
    values_ = data.at(d.series).values();
    lag_ = d.lag;
    window_ = {std::max<std::int64_t>(0, d.lag + 1), std::min<std::int64_t>(n_ - 1, n_ - 1 + d.lag)};
  }
  void resolve(const term::Interaction& x, const MultiSeries& data) {
    std::visit([&](const auto& inner) { resolve(inner, data); }, x.inner);
    dummy_ = x.dummy;
  }

  std::int64_t n_;
  std::int64_t first_period_;
  Kind kind_ = Kind::constant;
  std::span<const double> values_;
  std::int64_t lag_ = 0;
  std::optional<term::BreakDummy> dummy_;
  TermWindow window_{0, 0};
};

}  // namespace detail

/// Rows are the maximal sample on which every term is defined (intersected
/// with first_row/end_row when set); columns follow the regressor order.
[[nodiscard]] inline Design build_design(const DesignSpec& spec, const MultiSeries& data) {
  const auto n_intercepts = std::count_if(spec.regressors.begin(), spec.regressors.end(),
                                          [](const Term& t) { return std::holds_alternative<term::Intercept>(t); });
  if (n_intercepts > 1) throw DomainError("design contains more than one intercept");
  if (data.length() == 0) throw DomainError("empty data set");

  const detail::ResolvedTerm dependent(spec.dependent, data);
  std::vector<detail::ResolvedTerm> regressors;
  regressors.reserve(spec.regressors.size());
  for (const auto& t : spec.regressors) regressors.emplace_back(t, data);

  auto win = dependent.window();
  for (const auto& t : regressors) {
    win.lo = std::max(win.lo, t.window().lo);
    win.hi = std::min(win.hi, t.window().hi);
  }
  if (spec.first_row) win.lo = std::max<std::int64_t>(win.lo, static_cast<std::int64_t>(*spec.first_row));
  if (spec.end_row) win.hi = std::min<std::int64_t>(win.hi, static_cast<std::int64_t>(*spec.end_row) - 1);
  if (win.hi < win.lo) throw DomainError("empty effective sample");

  const auto rows = win.hi - win.lo + 1;
  const auto cols = static_cast<Eigen::Index>(spec.regressors.size());
  if (rows < cols + 1) {
    throw DomainError("effective sample of " + std::to_string(rows) + " rows cannot identify " +
                      std::to_string(cols) + " coefficients");
  }

  Design d;
  d.X.resize(rows, cols);
  d.y.resize(rows);
  for (std::int64_t r = 0; r < rows; ++r) d.y(r) = dependent.value(win.lo + r);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& t = regressors[static_cast<std::size_t>(c)];
    for (std::int64_t r = 0; r < rows; ++r) d.X(r, c) = t.value(win.lo + r);
  }
  for (const auto& t : spec.regressors) d.column_names.push_back(detail::term_name(t));
  d.first_row = static_cast<std::size_t>(win.lo);
  d.first_period = data.first_period() + win.lo;
  return d;
}

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  double ssr = 0.0;
  /// sqrt(ssr / (n_obs - n_params))
  double ser = 0.0;
  Eigen::VectorXd stderrs;
  Eigen::VectorXd t_stats;
  /// (X'X)^{-1}; the coefficient covariance is ser^2 times this.
  Eigen::MatrixXd xtx_inverse;
  std::size_t n_obs = 0;
  std::size_t n_params = 0;
  std::vector<std::string> column_names;
  /// Sample fingerprint used to check that two fits share a response.
  std::int64_t first_period = 0;
  double response_sum = 0.0;

  [[nodiscard]] std::size_t df_resid() const noexcept { return n_obs - n_params; }

  [[nodiscard]] std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i)
      if (column_names[i] == name) return i;
    throw DomainError("no coefficient named '" + name + "'");
  }
  [[nodiscard]] double coefficient(const std::string& name) const {
    return coefficients(static_cast<Eigen::Index>(index_of(name)));
  }
};

/// QR least squares with a singular-value rank check on R:
/// sigma_min <= max(n, k) * eps * sigma_max is declared deficient.
[[nodiscard]] inline OlsFit solve_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      std::vector<std::string> column_names = {}) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (y.size() != n) throw DomainError("design and response have different row counts");
  if (k == 0) throw DomainError("design has no columns");
  if (n <= k) {
    throw DomainError("need more observations (" + std::to_string(n) + ") than coefficients (" +
                      std::to_string(k) + ")");
  }
  if (column_names.empty()) {
    for (Eigen::Index c = 0; c < k; ++c) column_names.push_back("x" + std::to_string(c));
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    const auto& sv = svd.singularValues();
    const double tol = static_cast<double>(std::max(n, k)) * std::numeric_limits<double>::epsilon() * sv(0);
    if (!(sv(k - 1) > tol)) {
      const Eigen::JacobiSVD<Eigen::MatrixXd> full(R, Eigen::ComputeFullV);
      const Eigen::VectorXd v = full.matrixV().col(k - 1);
      const double vmax = v.cwiseAbs().maxCoeff();
      std::vector<std::string> involved;
      std::string listing;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (std::abs(v(c)) >= 0.1 * vmax) {
          involved.push_back(column_names[static_cast<std::size_t>(c)]);
          listing += (listing.empty() ? "" : ", ") + involved.back();
        }
      }
      throw RankDeficiencyError("perfect multicollinearity among columns: " + listing, std::move(involved));
    }
  }

  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.ssr = fit.residuals.squaredNorm();
  fit.n_obs = static_cast<std::size_t>(n);
  fit.n_params = static_cast<std::size_t>(k);
  fit.ser = std::sqrt(fit.ssr / static_cast<double>(n - k));
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  fit.xtx_inverse = Rinv * Rinv.transpose();
  fit.stderrs = fit.ser * fit.xtx_inverse.diagonal().cwiseSqrt();
  fit.t_stats = fit.coefficients.cwiseQuotient(fit.stderrs);
  fit.column_names = std::move(column_names);
  fit.response_sum = y.sum();
  return fit;
}

[[nodiscard]] inline OlsFit solve_ols(const Design& d) {
  auto fit = solve_ols(d.X, d.y, d.column_names);
  fit.first_period = d.first_period;
  return fit;
}

struct FStatistic {
  double value = 0.0;
  std::size_t df_num = 0;
  std::size_t df_den = 0;
};

/// (Delta SSR / q) / (SSR_u / df_u) for nested fits on the same response.
[[nodiscard]] inline FStatistic f_statistic(const OlsFit& restricted, const OlsFit& unrestricted, std::size_t q) {
  if (q == 0) throw DomainError("number of restrictions must be positive");
  const double scale = std::max(std::abs(restricted.response_sum), 1.0);
  if (restricted.n_obs != unrestricted.n_obs || restricted.first_period != unrestricted.first_period ||
      std::abs(restricted.response_sum - unrestricted.response_sum) > 1e-9 * scale) {
    throw DomainError("restricted and unrestricted fits use different samples");
  }
  const double tol = 1e-10 * std::max(restricted.ssr, std::numeric_limits<double>::min());
  double delta = restricted.ssr - unrestricted.ssr;
  if (delta < -tol) {
    throw NumericalError("restricted SSR is smaller than unrestricted SSR beyond tolerance");
  }
  delta = std::max(delta, 0.0);
  FStatistic f;
  f.df_num = q;
  f.df_den = unrestricted.df_resid();
  if (delta == 0.0) {
    f.value = 0.0;
  } else {
    f.value = (delta / static_cast<double>(q)) / (unrestricted.ssr / static_cast<double>(f.df_den));
  }
  return f;
}

/// Single-column data set view for univariate designs.
[[nodiscard]] inline MultiSeries as_collection(const TimeSeries& s) {
  return MultiSeries({s.relabeled(s.name())});
}

}  // namespace tsecon
