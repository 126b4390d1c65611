#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "tsecon/ar.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/random.hpp"
#include "tsecon/unit_root.hpp"

using namespace tsecon;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXd random_design(Rng& rng, Eigen::Index n, Eigen::Index k) {
  Eigen::MatrixXd X(n, k);
  for (Eigen::Index r = 0; r < n; ++r) {
    X(r, 0) = 1.0;
    for (Eigen::Index c = 1; c < k; ++c) X(r, c) = rng.normal();
  }
  return X;
}

}  // namespace

TEST_CASE("AR(1) design on a short series") {
  const auto d = build_design(ar_design("y", 1), as_collection(TimeSeries({1, 2, 3, 4})));
  REQUIRE(d.rows() == 3);
  CHECK(d.y == Eigen::Vector3d(2, 3, 4));
  Eigen::MatrixXd expected(3, 2);
  expected << 1, 1, 1, 2, 1, 3;
  CHECK(d.X == expected);
  CHECK(d.column_names == std::vector<std::string>{"const", "y.L1"});
  CHECK(d.first_period == 2);
}

TEST_CASE("ADF design drops one observation") {
  const auto d = build_design(adf_design("y", Deterministic::drift, 0), as_collection(TimeSeries({1, 4, 2, 8, 5})));
  CHECK(d.rows() == 4);
  CHECK(d.cols() == 2);
}

TEST_CASE("lead/lag difference window truncates both ends") {
  MultiSeries data({TimeSeries({1, 3, 2, 5, 4, 7, 6, 9, 8, 11}, "y"), TimeSeries({0, 1, 1, 2, 3, 5, 8, 13, 21, 34}, "x")});
  DesignSpec spec{term::Lag{"y", 0}, {term::Intercept{}, term::Lag{"x", 0}}, {}, {}};
  for (int j = -1; j <= 1; ++j) spec.regressors.emplace_back(term::DiffLag{"x", j});
  const auto d = build_design(spec, data);
  // Delta x_{t-1} needs t >= 3 (index 2); Delta x_{t+1} needs t <= T - 1
  CHECK(d.first_row == 2);
  CHECK(d.rows() == 10 - 2 - 1);
  CHECK(d.column_names[2] == "d.x.F1");
  CHECK(d.X(0, 2) == 2.0 - 1.0);
  CHECK(d.X(0, 3) == 1.0 - 1.0);
  CHECK(d.X(0, 4) == 1.0 - 0.0);
}

TEST_CASE("design rejects two intercepts and empty samples") {
  const auto data = as_collection(TimeSeries({1, 2, 3, 4}));
  DesignSpec two{term::Lag{"y", 0}, {term::Intercept{}, term::Intercept{}}, {}, {}};
  CHECK_THROWS_AS(build_design(two, data), DomainError);
  CHECK_THROWS_AS(build_design(ar_design("y", 3), data), DomainError);
  DesignSpec neg{term::Lag{"y", 0}, {term::Intercept{}, term::Lag{"y", -1}}, {}, {}};
  CHECK_THROWS_AS(build_design(neg, data), DomainError);
}

TEST_CASE("exact line is recovered with zero SSR") {
  Eigen::MatrixXd X(6, 2);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i * 0.5 - 1.0;
    y(i) = 2.0 + 3.0 * X(i, 1);
  }
  const auto fit = solve_ols(X, y);
  CHECK_THAT(fit.coefficients(0), WithinAbs(2.0, 1e-13));
  CHECK_THAT(fit.coefficients(1), WithinAbs(3.0, 1e-13));
  CHECK(fit.ssr < 1e-24);
}

TEST_CASE("intercept-only regression returns the mean") {
  Eigen::VectorXd y(5);
  y << 1, 4, 2, 8, 5;
  const auto fit = solve_ols(Eigen::MatrixXd::Ones(5, 1), y);
  CHECK_THAT(fit.coefficients(0), WithinRel(4.0, 1e-14));
}

TEST_CASE("rank deficiency names the collinear columns") {
  Rng rng(2);
  Eigen::MatrixXd X = random_design(rng, 40, 4);
  X.col(3) = 2.0 * X.col(1) - X.col(0);
  Eigen::VectorXd y = X.col(1) + Eigen::VectorXd::Ones(40);
  try {
    (void)solve_ols(X, y, {"const", "a", "b", "c"});
    FAIL("expected rank deficiency");
  } catch (const RankDeficiencyError& e) {
    const auto& cols = e.columns();
    CHECK(std::find(cols.begin(), cols.end(), "a") != cols.end());
    CHECK(std::find(cols.begin(), cols.end(), "c") != cols.end());
    CHECK(std::find(cols.begin(), cols.end(), "b") == cols.end());
  }
}

TEST_CASE("constant series cannot fit an AR") {
  CHECK_THROWS_AS(fit_ar(TimeSeries(std::vector<double>(30, 3.0)), 1), RankDeficiencyError);
}

TEST_CASE("QR solve agrees with the extended-precision normal equations") {
  Rng rng(77);
  for (int inst = 0; inst < 200; ++inst) {
    const Eigen::Index k = 2 + inst % 6;
    const Eigen::Index n = 30 + 7 * (inst % 11);
    const auto X = random_design(rng, n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) y(r) = X.row(r).sum() + rng.normal();
    const auto fit = solve_ols(X, y);
    const auto oracle = test_oracle::normal_equations(X, y);
    for (Eigen::Index c = 0; c < k; ++c) CHECK_THAT(fit.coefficients(c), WithinRel(oracle(c), 1e-9));
  }
}

TEST_CASE("fit invariants: SSR, orthogonality, standard errors") {
  Rng rng(9);
  const auto X = random_design(rng, 80, 4);
  Eigen::VectorXd y(80);
  for (Eigen::Index r = 0; r < 80; ++r) y(r) = 0.5 - X(r, 1) + 2.0 * X(r, 3) + rng.normal();
  const auto fit = solve_ols(X, y);
  CHECK_THAT(fit.ssr, WithinRel(fit.residuals.squaredNorm(), 1e-10));
  const double scale = X.cwiseAbs().maxCoeff() * y.cwiseAbs().maxCoeff() * 80.0;
  CHECK((X.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  CHECK_THAT(fit.ser, WithinRel(std::sqrt(fit.ssr / 76.0), 1e-14));
  const Eigen::MatrixXd cov = fit.ser * fit.ser * (X.transpose() * X).inverse();
  for (Eigen::Index c = 0; c < 4; ++c) CHECK_THAT(fit.stderrs(c), WithinRel(std::sqrt(cov(c, c)), 1e-9));
  CHECK(fit.n_obs > fit.n_params);
}

TEST_CASE("scale equivariance and F invariance") {
  Rng rng(10);
  const auto X = random_design(rng, 60, 3);
  Eigen::VectorXd y(60);
  for (Eigen::Index r = 0; r < 60; ++r) y(r) = X(r, 1) + rng.normal();
  const auto a = solve_ols(X, y);
  const auto b = solve_ols(X, 7.5 * y);
  for (Eigen::Index c = 0; c < 3; ++c) CHECK_THAT(b.coefficients(c), WithinRel(7.5 * a.coefficients(c), 1e-12));
  CHECK_THAT(b.ser, WithinRel(7.5 * a.ser, 1e-12));
  const auto ra = solve_ols(X.leftCols(2), y);
  const auto rb = solve_ols(X.leftCols(2), 7.5 * y);
  CHECK_THAT(f_statistic(rb, b, 1).value, WithinRel(f_statistic(ra, a, 1).value, 1e-10));
}

TEST_CASE("row permutation leaves coefficients unchanged") {
  Rng rng(12);
  const auto X = random_design(rng, 50, 3);
  Eigen::VectorXd y(50);
  for (Eigen::Index r = 0; r < 50; ++r) y(r) = rng.normal();
  std::vector<int> order(50);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  std::rotate(order.begin(), order.begin() + 17, order.end());
  Eigen::MatrixXd Xp(50, 3);
  Eigen::VectorXd yp(50);
  for (int i = 0; i < 50; ++i) {
    Xp.row(i) = X.row(order[static_cast<std::size_t>(i)]);
    yp(i) = y(order[static_cast<std::size_t>(i)]);
  }
  const auto a = solve_ols(X, y);
  const auto b = solve_ols(Xp, yp);
  for (Eigen::Index c = 0; c < 3; ++c) CHECK_THAT(b.coefficients(c), WithinAbs(a.coefficients(c), 1e-12));
}

TEST_CASE("SSR never increases when a regressor is added") {
  Rng rng(13);
  for (int inst = 0; inst < 100; ++inst) {
    const auto X = random_design(rng, 40, 6);
    Eigen::VectorXd y(40);
    for (Eigen::Index r = 0; r < 40; ++r) y(r) = rng.normal();
    double prev = solve_ols(X.leftCols(1), y).ssr;
    for (Eigen::Index k = 2; k <= 6; ++k) {
      const double ssr = solve_ols(X.leftCols(k), y).ssr;
      CHECK(ssr <= prev * (1.0 + 1e-12));
      prev = ssr;
    }
  }
}

TEST_CASE("F statistic: identical models and sample mismatch") {
  Rng rng(14);
  const auto X = random_design(rng, 30, 3);
  Eigen::VectorXd y(30);
  for (Eigen::Index r = 0; r < 30; ++r) y(r) = rng.normal();
  const auto fit = solve_ols(X, y);
  const auto f = f_statistic(fit, fit, 2);
  CHECK(f.value == 0.0);
  CHECK(f.df_num == 2);
  CHECK(f.df_den == 27);
  const auto other = solve_ols(X.topRows(29), y.head(29));
  CHECK_THROWS_AS(f_statistic(other, fit, 1), DomainError);
  // a "restricted" fit with a much smaller SSR is numerically inconsistent
  const auto bigger = solve_ols(X.leftCols(1), y);
  CHECK_THROWS_AS(f_statistic(fit, bigger, 2), NumericalError);
}

TEST_CASE("F grows with sample size when a true coefficient is dropped") {
  double previous = 0.0;
  for (Eigen::Index n : {50, 200, 800, 3200}) {
    Rng rng(15);
    const auto X = random_design(rng, n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) y(r) = 0.5 * X(r, 1) + rng.normal();
    const double f = f_statistic(solve_ols(X.leftCols(1), y), solve_ols(X, y), 1).value;
    CHECK(f > previous);
    previous = f;
  }
}
