#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsecon {

/// A precondition on the data or parameters does not hold (short sample,
/// nonstationary parameters where stationarity is required, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The design matrix violates the no-perfect-multicollinearity assumption.
class RankDeficiencyError : public DomainError {
 public:
  RankDeficiencyError(const std::string& what, std::vector<std::string> columns)
      : DomainError(what), columns_(std::move(columns)) {}

  [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

/// Floating-point results contradict an algebraic identity beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsecon
