#pragma once

/// Declarative data-generating processes and their Gaussian simulators.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsecon/ar.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/random.hpp"
#include "tsecon/series.hpp"
#include "tsecon/var.hpp"

namespace tsecon {

namespace dgp {

struct WhiteNoise {
  double mean = 0.0;
};

/// Y_t = beta0 + sum beta_i Y_{t-i} + u_t
struct Ar {
  double beta0 = 0.0;
  std::vector<double> betas;
};

/// Y_t = alpha0 + u_t - sum alpha_i u_{t-i}
struct Ma {
  double alpha0 = 0.0;
  std::vector<double> alphas;
};

/// Y_t = beta0 + sum beta_i Y_{t-i} + u_t - sum alpha_i u_{t-i}
struct Arma {
  double beta0 = 0.0;
  std::vector<double> betas;
  std::vector<double> alphas;
};

/// Y_t = Y_{t-1} + u_t from Y_0 = 0
struct RandomWalk {};

/// Y_t = beta0 + Y_{t-1} + u_t from Y_0 = 0
struct RandomWalkDrift {
  double beta0 = 0.0;
};

/// k independent driftless random walks, named y, x1, ..., x_{k-1}
struct IndependentRandomWalks {
  std::size_t count = 2;
};

/// Reduced-form VAR; the innovation covariance is params.sigma (sigma2 unused).
struct Var {
  VarParams params;
  std::vector<std::string> names;
};

/// X_t = X_{t-1} + drift + v_t,  z_t = noise_ar z_{t-1} + e_t,
/// Y_t = alpha + theta X_t + z_t, with corr(e_t, v_t) = innovation_corr.
struct CointegratedPair {
  double theta = 1.0;
  double alpha = 0.0;
  double drift = 0.0;
  double noise_ar = 0.0;
  double innovation_corr = 0.0;
};

/// AR(p) whose intercept switches from beta0_before to beta0_after after
/// observation floor(break_fraction * T).
struct ArBreak {
  double beta0_before = 0.0;
  double beta0_after = 0.0;
  std::vector<double> betas;
  double break_fraction = 0.5;
};

}  // namespace dgp

using DgpKind = std::variant<dgp::WhiteNoise, dgp::Ar, dgp::Ma, dgp::Arma, dgp::RandomWalk, dgp::RandomWalkDrift,
                             dgp::IndependentRandomWalks, dgp::Var, dgp::CointegratedPair, dgp::ArBreak>;

struct DgpSpec {
  DgpKind kind = dgp::WhiteNoise{};
  /// Innovation variance; zero gives the deterministic recursion.
  double sigma2 = 1.0;
  /// Defaults to max(50, 10 * order) for stationary kinds, 0 for random walks.
  std::optional<std::size_t> burn_in;
  /// Starting values for AR-type recursions (oldest first). When given, the
  /// output begins with them and no burn-in is applied.
  std::optional<std::vector<double>> initial;
  std::uint64_t seed = 0;

  void validate() const;
  [[nodiscard]] std::size_t effective_burn_in() const;
  [[nodiscard]] std::string kind_name() const;
};

namespace detail {

inline bool stationary_betas(const std::vector<double>& betas) {
  if (std::all_of(betas.begin(), betas.end(), [](double b) { return b == 0.0; })) return true;
  return is_stationary(LagPolynomial(betas)).stationary;
}

inline std::size_t default_burn_in(std::size_t order) { return std::max<std::size_t>(50, 10 * order); }

}  // namespace detail

inline void DgpSpec::validate() const {
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw DomainError("innovation variance must be nonnegative");
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, dgp::Ar> || std::is_same_v<K, dgp::Arma> || std::is_same_v<K, dgp::ArBreak>) {
          if (!detail::stationary_betas(k.betas)) throw DomainError("unstable parameters: AR part is not stationary");
        }
        if constexpr (std::is_same_v<K, dgp::ArBreak>) {
          if (!(k.break_fraction > 0.0 && k.break_fraction < 1.0)) throw DomainError("break fraction must lie in (0, 1)");
        }
        if constexpr (std::is_same_v<K, dgp::IndependentRandomWalks>) {
          if (k.count == 0) throw DomainError("need at least one random walk");
        }
        if constexpr (std::is_same_v<K, dgp::CointegratedPair>) {
          if (!(std::abs(k.noise_ar) < 1.0)) throw DomainError("unstable parameters: cointegrating noise must be stationary");
          if (!(std::abs(k.innovation_corr) <= 1.0)) throw DomainError("innovation correlation must lie in [-1, 1]");
        }
        if constexpr (std::is_same_v<K, dgp::Var>) {
          k.params.validate();
          if (!stability(k.params.A).stable) throw DomainError("unstable parameters: VAR is not stable");
          const Eigen::MatrixXd& s = k.params.sigma;
          if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, s.cwiseAbs().maxCoeff())) {
            throw DomainError("innovation covariance must be symmetric");
          }
          const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
          if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
            throw DomainError("innovation covariance must be positive semidefinite");
          }
          if (!k.names.empty() && k.names.size() != k.params.k()) throw DomainError("VAR names do not match dimension");
        }
      },
      kind);
}

inline std::size_t DgpSpec::effective_burn_in() const {
  if (initial) return 0;
  if (burn_in) return *burn_in;
  return std::visit(
      [](const auto& k) -> std::size_t {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, dgp::Ar> || std::is_same_v<K, dgp::ArBreak>) {
          return detail::default_burn_in(k.betas.size());
        } else if constexpr (std::is_same_v<K, dgp::Ma>) {
          return detail::default_burn_in(k.alphas.size());
        } else if constexpr (std::is_same_v<K, dgp::Arma>) {
          return detail::default_burn_in(std::max(k.betas.size(), k.alphas.size()));
        } else if constexpr (std::is_same_v<K, dgp::Var>) {
          return detail::default_burn_in(k.params.p());
        } else if constexpr (std::is_same_v<K, dgp::CointegratedPair>) {
          return detail::default_burn_in(1);  // for the noise component only
        } else if constexpr (std::is_same_v<K, dgp::WhiteNoise>) {
          return 0;
        } else {
          return 0;
        }
      },
      kind);
}

inline std::string DgpSpec::kind_name() const {
  struct Names {
    std::string operator()(const dgp::WhiteNoise&) const { return "white_noise"; }
    std::string operator()(const dgp::Ar&) const { return "ar"; }
    std::string operator()(const dgp::Ma&) const { return "ma"; }
    std::string operator()(const dgp::Arma&) const { return "arma"; }
    std::string operator()(const dgp::RandomWalk&) const { return "random_walk"; }
    std::string operator()(const dgp::RandomWalkDrift&) const { return "random_walk_drift"; }
    std::string operator()(const dgp::IndependentRandomWalks&) const { return "independent_random_walks"; }
    std::string operator()(const dgp::Var&) const { return "var"; }
    std::string operator()(const dgp::CointegratedPair&) const { return "cointegrated_pair"; }
    std::string operator()(const dgp::ArBreak&) const { return "ar_break"; }
  };
  return std::visit(Names{}, kind);
}

[[nodiscard]] inline DgpSpec make_dgp(DgpKind kind, std::uint64_t seed = 0, double sigma2 = 1.0) {
  DgpSpec spec;
  spec.kind = std::move(kind);
  spec.seed = seed;
  spec.sigma2 = sigma2;
  return spec;
}

/// ARMA recursion driven by a supplied innovation sequence. The first
/// `burn_in` outputs are discarded; `initial` values, when given, are emitted
/// first and seed the AR part.
[[nodiscard]] inline std::vector<double> arma_recursion(double intercept, const std::vector<double>& betas,
                                                        const std::vector<double>& alphas,
                                                        std::span<const double> innovations, std::size_t burn_in,
                                                        const std::optional<std::vector<double>>& initial,
                                                        std::optional<std::pair<std::size_t, double>> shift = {}) {
  const std::size_t p = betas.size();
  const std::size_t q = alphas.size();
  std::vector<double> y;
  std::vector<double> u;
  y.reserve(innovations.size() + (initial ? initial->size() : 0));
  if (initial) {
    y = *initial;
    u.assign(initial->size(), 0.0);
  }
  std::size_t emitted = y.size();
  for (std::size_t t = 0; t < innovations.size(); ++t) {
    double c = intercept;
    if (shift && emitted >= burn_in + shift->first) c = shift->second;
    double acc = c;
    for (std::size_t i = 1; i <= p && i <= y.size(); ++i) acc += betas[i - 1] * y[y.size() - i];
    acc += innovations[t];
    for (std::size_t i = 1; i <= q && i <= u.size(); ++i) acc -= alphas[i - 1] * u[u.size() - i];
    y.push_back(acc);
    u.push_back(innovations[t]);
    ++emitted;
  }
  if (burn_in > 0) y.erase(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(std::min(burn_in, y.size())));
  return y;
}

namespace detail {

inline std::vector<double> draw(Rng& rng, std::size_t n, double sd) {
  std::vector<double> out(n);
  for (auto& v : out) v = sd * rng.normal();
  return out;
}

inline std::vector<double> cumulative(std::span<const double> steps, double drift) {
  std::vector<double> out(steps.size());
  double level = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    level = level + drift + steps[t];
    out[t] = level;
  }
  return out;
}

}  // namespace detail

/// Random walk (with optional drift) driven by supplied innovations: Y_t = Y_{t-1} + drift + u_t, Y_0 = 0.
[[nodiscard]] inline TimeSeries random_walk_from_innovations(std::span<const double> innovations, double drift = 0.0) {
  return TimeSeries(detail::cumulative(innovations, drift), "y");
}

[[nodiscard]] inline MultiSeries simulate(const DgpSpec& spec, std::size_t T, Rng& rng) {
  if (T < 1) throw DomainError("simulation length must be at least 1");
  spec.validate();
  const double sd = std::sqrt(spec.sigma2);
  const std::size_t burn = spec.effective_burn_in();
  const std::size_t n_initial = spec.initial ? spec.initial->size() : 0;
  const std::size_t n_draw = burn + (T > n_initial ? T - n_initial : 0);

  struct Visitor {
    const DgpSpec& spec;
    std::size_t T;
    Rng& rng;
    double sd;
    std::size_t burn;
    std::size_t n_draw;

    MultiSeries one(std::vector<double> v) const {
      v.resize(T);
      return MultiSeries({TimeSeries(std::move(v), "y")});
    }
    MultiSeries operator()(const dgp::WhiteNoise& k) const {
      auto v = detail::draw(rng, T, sd);
      for (auto& x : v) x += k.mean;
      return one(std::move(v));
    }
    MultiSeries operator()(const dgp::Ar& k) const {
      const auto e = detail::draw(rng, n_draw, sd);
      return one(arma_recursion(k.beta0, k.betas, {}, e, burn, spec.initial));
    }
    MultiSeries operator()(const dgp::Ma& k) const {
      const auto e = detail::draw(rng, n_draw, sd);
      return one(arma_recursion(k.alpha0, {}, k.alphas, e, burn, spec.initial));
    }
    MultiSeries operator()(const dgp::Arma& k) const {
      const auto e = detail::draw(rng, n_draw, sd);
      return one(arma_recursion(k.beta0, k.betas, k.alphas, e, burn, spec.initial));
    }
    MultiSeries operator()(const dgp::ArBreak& k) const {
      const auto e = detail::draw(rng, n_draw, sd);
      const auto at = static_cast<std::size_t>(std::floor(k.break_fraction * static_cast<double>(T)));
      return one(arma_recursion(k.beta0_before, k.betas, {}, e, burn, spec.initial, std::pair{at, k.beta0_after}));
    }
    MultiSeries operator()(const dgp::RandomWalk&) const {
      return one(detail::cumulative(detail::draw(rng, T, sd), 0.0));
    }
    MultiSeries operator()(const dgp::RandomWalkDrift& k) const {
      return one(detail::cumulative(detail::draw(rng, T, sd), k.beta0));
    }
    MultiSeries operator()(const dgp::IndependentRandomWalks& k) const {
      MultiSeries out;
      for (std::size_t c = 0; c < k.count; ++c) {
        out.add(TimeSeries(detail::cumulative(detail::draw(rng, T, sd), 0.0),
                           c == 0 ? std::string("y") : "x" + std::to_string(c)));
      }
      return out;
    }
    MultiSeries operator()(const dgp::CointegratedPair& k) const {
      const double rho = k.innovation_corr;
      const double rest = std::sqrt(std::max(0.0, 1.0 - rho * rho));
      const std::size_t total = burn + T;
      std::vector<double> v(total);
      std::vector<double> e(total);
      for (std::size_t t = 0; t < total; ++t) {
        v[t] = sd * rng.normal();
        e[t] = rho * v[t] + rest * sd * rng.normal();
      }
      std::vector<double> z(total);
      double zt = 0.0;
      for (std::size_t t = 0; t < total; ++t) {
        zt = k.noise_ar * zt + e[t];
        z[t] = zt;
      }
      std::vector<double> x(T);
      std::vector<double> y(T);
      double level = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        level = level + k.drift + v[burn + t];
        x[t] = level;
        y[t] = k.alpha + k.theta * level + z[burn + t];
      }
      return MultiSeries({TimeSeries(std::move(y), "y"), TimeSeries(std::move(x), "x")});
    }
    MultiSeries operator()(const dgp::Var& k) const {
      const auto& P = k.params;
      const auto kk = static_cast<Eigen::Index>(P.k());
      const std::size_t p = P.p();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.sigma);
      const Eigen::MatrixXd L =
          es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
      Eigen::MatrixXd sum_a = Eigen::MatrixXd::Identity(kk, kk);
      for (const auto& a : P.A) sum_a -= a;
      const Eigen::VectorXd mu = sum_a.partialPivLu().solve(P.delta);

      const std::size_t total = burn + T;
      std::vector<Eigen::VectorXd> z(p, mu);
      z.reserve(p + total);
      Eigen::VectorXd e(kk);
      for (std::size_t t = 0; t < total; ++t) {
        for (Eigen::Index i = 0; i < kk; ++i) e(i) = rng.normal();
        Eigen::VectorXd next = P.delta + L * e;
        for (std::size_t j = 1; j <= p; ++j) next += P.A[j - 1] * z[z.size() - j];
        z.push_back(std::move(next));
      }
      MultiSeries out;
      for (Eigen::Index i = 0; i < kk; ++i) {
        std::vector<double> col(T);
        for (std::size_t t = 0; t < T; ++t) col[t] = z[p + burn + t](i);
        out.add(TimeSeries(std::move(col), k.names.empty() ? "z" + std::to_string(i + 1)
                                                           : k.names[static_cast<std::size_t>(i)]));
      }
      return out;
    }
  };
  return std::visit(Visitor{spec, T, rng, sd, burn, n_draw}, spec.kind);
}

/// Deterministic given spec.seed (stream 0 of that seed).
[[nodiscard]] inline MultiSeries simulate(const DgpSpec& spec, std::size_t T) {
  Rng rng = Rng::stream(spec.seed, 0);
  return simulate(spec, T, rng);
}

[[nodiscard]] inline TimeSeries simulate_series(const DgpSpec& spec, std::size_t T) {
  return simulate(spec, T).column(0);
}

}  // namespace tsecon
