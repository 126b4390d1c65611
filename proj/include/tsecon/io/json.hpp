#pragma once

/// JSON encodings of fits, forecasts and test reports. Non-finite numbers
/// are written as null.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "tsecon/ar.hpp"
#include "tsecon/cointegration.hpp"
#include "tsecon/lag_select.hpp"
#include "tsecon/monte_carlo.hpp"
#include "tsecon/ols.hpp"
#include "tsecon/series.hpp"
#include "tsecon/test_report.hpp"
#include "tsecon/var.hpp"

namespace tsecon::io {

using Json = nlohmann::ordered_json;

[[nodiscard]] inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Significance levels as object keys: 0.05 -> "0.05".
[[nodiscard]] inline std::string level_key(double level) {
  std::ostringstream os;
  os << level;
  return os.str();
}

[[nodiscard]] inline Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

[[nodiscard]] inline Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(number(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

[[nodiscard]] inline Json to_json(const CvProvenance& p) {
  return std::visit(
      [](const auto& x) -> Json {
        using P = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<P, provenance::PublishedTable>) {
          return Json{{"source", "published_table"}, {"table", x.table}};
        } else if constexpr (std::is_same_v<P, provenance::MonteCarlo>) {
          return Json{{"source", "monte_carlo"}, {"seed", x.seed}, {"reps", x.reps}, {"t_sim", x.t_sim}, {"rng", x.rng}};
        } else {
          return Json{{"source", "f_distribution"}, {"df_num", x.df_num}, {"df_den", x.df_den}};
        }
      },
      p);
}

[[nodiscard]] inline Json to_json(const TestReport& r) {
  Json j;
  j["name"] = r.name;
  j["statistic"] = number(r.statistic);
  j["distribution"] = r.distribution;
  j["tail"] = r.tail == Tail::left ? "left" : "right";
  Json cv = Json::object();
  for (const auto& [l, v] : r.critical_values) cv[level_key(l)] = number(v);
  j["critical_values"] = cv;
  Json dec = Json::object();
  for (const auto& [l, d] : r.decisions) dec[level_key(l)] = d == Decision::reject ? "reject" : "fail_to_reject";
  j["decisions"] = dec;
  j["cv_provenance"] = to_json(r.cv_provenance);
  Json nu = Json::object();
  for (const auto& [k, v] : r.nuisance) nu[k] = number(v);
  j["nuisance"] = nu;
  j["p_value"] = r.p_value ? number(*r.p_value) : Json(nullptr);
  j["p_value_bracket"] = r.p_value_bracket ? Json(*r.p_value_bracket) : Json(nullptr);
  j["degenerate"] = r.degenerate;
  j["notes"] = r.notes;
  if (!r.statistic_path.empty()) {
    Json path = Json::array();
    for (const auto& [tau, f] : r.statistic_path) path.push_back(Json{{"tau", tau}, {"statistic", number(f)}});
    j["statistic_path"] = path;
  }
  return j;
}

[[nodiscard]] inline Json to_json(const OlsFit& f) {
  Json coefs = Json::array();
  for (std::size_t i = 0; i < f.column_names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    coefs.push_back(Json{{"name", f.column_names[i]},
                         {"estimate", number(f.coefficients(k))},
                         {"std_error", number(f.stderrs(k))},
                         {"t_stat", number(f.t_stats(k))}});
  }
  return Json{{"coefficients", coefs}, {"ssr", number(f.ssr)}, {"ser", number(f.ser)},
              {"n_obs", f.n_obs},      {"n_params", f.n_params}, {"first_period", f.first_period}};
}

[[nodiscard]] inline Json to_json(const RootReport& r) {
  return Json{{"stationary", r.stationary}, {"unit_root", r.unit_root}, {"root_moduli", to_json(r.root_moduli)}};
}

[[nodiscard]] inline Json to_json(const ArFit& f) {
  Json j{{"order", f.order}, {"intercept", number(f.intercept)}, {"betas", to_json(f.betas)}};
  const bool all_zero = std::all_of(f.betas.begin(), f.betas.end(), [](double b) { return b == 0.0; });
  j["roots"] = all_zero ? to_json(RootReport{true, false, {}}) : to_json(is_stationary(f.lag_poly()));
  j["ols"] = to_json(f.fit);
  return j;
}

[[nodiscard]] inline Json to_json(const CriterionTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back(Json{{"p", r.p}, {"value", number(r.value)}, {"fit_measure", number(r.fit_measure)}});
  return Json{{"criterion", to_string(t.criterion)}, {"chosen_p", t.chosen_p}, {"n_obs", t.n_obs}, {"rows", rows}};
}

[[nodiscard]] inline Json to_json(const ForecastResult& f, std::int64_t first_period) {
  Json pts = Json::array();
  for (std::size_t h = 0; h < f.point_forecasts.size(); ++h) {
    pts.push_back(Json{{"h", h + 1}, {"period", first_period + static_cast<std::int64_t>(h)},
                       {"forecast", number(f.point_forecasts[h])}});
  }
  return Json{{"horizon", f.horizon}, {"rmsfe_estimate", number(f.rmsfe_estimate)}, {"points", pts}};
}

[[nodiscard]] inline Json to_json(const StabilityReport& s) {
  return Json{{"stable", s.stable}, {"root_moduli", to_json(s.root_moduli)}};
}

[[nodiscard]] inline Json to_json(const VarFit& f) {
  Json a = Json::array();
  for (const auto& m : f.coefficient_matrices) a.push_back(to_json(m));
  Json eq = Json::array();
  for (const auto& e : f.per_equation_fits) eq.push_back(to_json(e));
  Eigen::VectorXd d = f.intercepts;
  return Json{{"k", f.k},
              {"p", f.p},
              {"names", f.names},
              {"intercepts", to_json(std::vector<double>(d.data(), d.data() + d.size()))},
              {"coefficient_matrices", a},
              {"residual_cov", to_json(f.residual_cov)},
              {"stability", to_json(stability(f))},
              {"equations", eq}};
}

[[nodiscard]] inline Json to_json(const CointFit& f) {
  return Json{{"alpha", number(f.alpha)},
              {"theta", to_json(f.theta)},
              {"n_regressors", f.n_regressors},
              {"first_stage", to_json(f.first_stage)},
              {"eg_adf", to_json(f.eg_adf)}};
}

[[nodiscard]] inline std::string to_string(DolsTerms t) {
  switch (t) {
    case DolsTerms::differences: return "differences";
    case DolsTerms::levels: return "levels";
    case DolsTerms::none: return "none";
  }
  return "differences";
}

[[nodiscard]] inline Json to_json(const DolsFit& f) {
  Json deltas = Json::array();
  for (const auto& d : f.deltas) deltas.push_back(to_json(d));
  return Json{{"theta", to_json(f.theta)}, {"intercept", number(f.intercept)}, {"p", f.p},
              {"terms", to_string(f.terms)}, {"deltas", deltas}, {"ols", to_json(f.fit)}};
}

[[nodiscard]] inline Json to_json(const McRun& run) {
  Json q = Json::object();
  for (const auto& [l, v] : run.quantiles) q[level_key(l)] = number(v);
  return Json{{"statistic", to_string(run.request.kind)},
              {"key", run.request.key()},
              {"tail", run.tail == Tail::left ? "left" : "right"},
              {"t_sim", run.request.t_sim},
              {"reps", run.request.reps},
              {"seed", run.request.seed},
              {"quantiles", q},
              {"summary", Json{{"count", run.summary.count},
                               {"mean", number(run.summary.mean)},
                               {"sd", number(run.summary.sd)},
                               {"min", number(run.summary.min)},
                               {"max", number(run.summary.max)}}}};
}

}  // namespace tsecon::io
