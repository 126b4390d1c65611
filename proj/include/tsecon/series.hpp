#pragma once

/// Time-series containers, lag/difference operators and sample moments.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsecon/errors.hpp"

namespace tsecon {

/// Ordered, finite, real-valued observations Y_t with an optional label and
/// an integer time index t = origin, origin + 1, ... (origin defaults to 1).
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, std::optional<std::string> label = std::nullopt,
                      std::optional<std::int64_t> origin = std::nullopt)
      : values_(std::move(values)), label_(std::move(label)), origin_(origin) {
    if (values_.empty()) throw DomainError("time series must contain at least one observation");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DomainError("time series value at position " + std::to_string(i) + " is not finite");
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] double back() const noexcept { return values_.back(); }

  [[nodiscard]] const std::optional<std::string>& label() const noexcept { return label_; }
  [[nodiscard]] std::string name() const { return label_.value_or("y"); }
  [[nodiscard]] const std::optional<std::int64_t>& origin() const noexcept { return origin_; }
  [[nodiscard]] std::int64_t first_period() const noexcept { return origin_.value_or(1); }
  [[nodiscard]] std::int64_t period(std::size_t i) const noexcept {
    return first_period() + static_cast<std::int64_t>(i);
  }

  [[nodiscard]] TimeSeries relabeled(std::string label) const {
    return TimeSeries(values_, std::move(label), origin_);
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
  std::optional<std::string> label_;
  std::optional<std::int64_t> origin_;
};

/// Named collection of equal-length series sharing one time index.
class MultiSeries {
 public:
  MultiSeries() = default;

  explicit MultiSeries(std::vector<TimeSeries> columns) {
    for (auto& c : columns) add(std::move(c));
  }

  void add(TimeSeries column) {
    if (!columns_.empty() && column.size() != columns_.front().size()) {
      throw DomainError("series '" + column.name() + "' has length " + std::to_string(column.size()) +
                        ", expected " + std::to_string(columns_.front().size()));
    }
    std::string n = column.label().value_or("y" + std::to_string(columns_.size() + 1));
    if (contains(n)) throw DomainError("duplicate series name '" + n + "'");
    columns_.push_back(column.relabeled(std::move(n)));
  }

  [[nodiscard]] bool contains(const std::string& name) const {
    for (const auto& c : columns_)
      if (c.name() == name) return true;
    return false;
  }

  [[nodiscard]] const TimeSeries& at(const std::string& name) const {
    for (const auto& c : columns_)
      if (c.name() == name) return c;
    throw DomainError("unknown series '" + name + "'");
  }

  [[nodiscard]] const TimeSeries& column(std::size_t i) const { return columns_.at(i); }
  [[nodiscard]] std::size_t width() const noexcept { return columns_.size(); }
  [[nodiscard]] std::size_t length() const noexcept {
    return columns_.empty() ? 0 : columns_.front().size();
  }
  [[nodiscard]] std::int64_t first_period() const noexcept {
    return columns_.empty() ? 1 : columns_.front().first_period();
  }
  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name());
    return out;
  }

  /// Sub-collection restricted to the given names, in that order.
  [[nodiscard]] MultiSeries select(const std::vector<std::string>& names) const {
    MultiSeries out;
    for (const auto& n : names) out.add(at(n));
    return out;
  }

 private:
  std::vector<TimeSeries> columns_;
};

/// j-th lag: element i holds Y_{t-j} for t = first_period + j + i.
[[nodiscard]] inline TimeSeries lag(const TimeSeries& series, std::size_t j) {
  if (j == 0) throw DomainError("lag order must be at least 1");
  if (j >= series.size()) throw DomainError("lag exceeds sample");
  auto v = series.values();
  return TimeSeries(std::vector<double>(v.begin(), v.end() - static_cast<std::ptrdiff_t>(j)), series.label(),
                    series.first_period() + static_cast<std::int64_t>(j));
}

/// order-fold first difference; output length T - order.
[[nodiscard]] inline TimeSeries difference(const TimeSeries& series, std::size_t order = 1) {
  if (order == 0) throw DomainError("difference order must be at least 1");
  if (order >= series.size()) throw DomainError("difference order exceeds sample");
  std::vector<double> v(series.values().begin(), series.values().end());
  for (std::size_t d = 0; d < order; ++d) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
    v.pop_back();
  }
  return TimeSeries(std::move(v), series.label(), series.first_period() + static_cast<std::int64_t>(order));
}

/// Mean convention for the sample autocovariance.
enum class AutocovarianceMean {
  /// (1/T) sum_{t=j+1}^T (Y_t - mean_{j+1..T}) (Y_{t-j} - mean_{1..T-j})
  window,
  /// (1/T) sum_{t=j+1}^T (Y_t - mean) (Y_{t-j} - mean)
  full_sample,
};

struct SampleMoments {
  double mean = 0.0;
  /// divisor T - 1
  double variance = 0.0;
  /// indexed by lag 0..max_lag
  std::vector<double> autocovariances;
  /// autocovariance_j / variance; nullopt when the variance is zero.
  /// Not clamped to [-1, 1]: the two estimators use different divisors.
  std::vector<std::optional<double>> autocorrelations;
};

[[nodiscard]] inline SampleMoments sample_moments(const TimeSeries& series, std::size_t max_lag,
                                                  AutocovarianceMean convention = AutocovarianceMean::window) {
  const std::size_t n = series.size();
  if (n < 2) throw DomainError("insufficient sample: at least two observations are required");
  if (max_lag > n - 2) {
    throw DomainError("max_lag " + std::to_string(max_lag) + " exceeds T - 2 = " + std::to_string(n - 2));
  }
  auto y = series.values();
  auto window_mean = [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += y[i];
    return s / static_cast<double>(end - begin);
  };

  SampleMoments m;
  m.mean = window_mean(0, n);
  double ss = 0.0;
  for (double v : y) ss += (v - m.mean) * (v - m.mean);
  m.variance = ss / static_cast<double>(n - 1);

  m.autocovariances.reserve(max_lag + 1);
  m.autocorrelations.reserve(max_lag + 1);
  for (std::size_t j = 0; j <= max_lag; ++j) {
    double lead_mean = m.mean;
    double lag_mean = m.mean;
    if (convention == AutocovarianceMean::window) {
      lead_mean = window_mean(j, n);
      lag_mean = window_mean(0, n - j);
    }
    double acc = 0.0;
    for (std::size_t t = j; t < n; ++t) acc += (y[t] - lead_mean) * (y[t - j] - lag_mean);
    const double gamma = acc / static_cast<double>(n);
    m.autocovariances.push_back(gamma);
    if (m.variance > 0.0) {
      m.autocorrelations.emplace_back(gamma / m.variance);
    } else {
      m.autocorrelations.emplace_back(std::nullopt);
    }
  }
  return m;
}

}  // namespace tsecon
