#pragma once

/// Command-line front end: one subcommand per library operation, JSON
/// reports on stdout, optional CSV emissions.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <array>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsecon/tsecon.hpp"
#include "tsecon/io/csv.hpp"
#include "tsecon/io/json.hpp"

#ifndef TSECON_VERSION
#define TSECON_VERSION "0.0.0"
#endif
#ifndef TSECON_DEFAULT_CV_FILE
#define TSECON_DEFAULT_CV_FILE "critical_values.txt"
#endif

namespace tsecon::cli {

inline constexpr const char* kSchemaVersion = "1.0";

enum ExitCode { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Bad or inconsistent command-line arguments.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, md.data(), &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw NumericalError("SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

[[nodiscard]] inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = io::detail::trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

[[nodiscard]] inline std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    const auto v = io::detail::parse_number(part, false);
    if (!v) throw UsageError("invalid number '" + part + "' in " + what);
    out.push_back(*v);
  }
  return out;
}

// "a,b;c,d" -> 2 x 2, rows separated by ';'.
[[nodiscard]] inline Eigen::MatrixXd parse_matrix(const std::string& s, const std::string& what) {
  const auto rows = split(s, ';');
  if (rows.empty()) throw UsageError(what + " is empty");
  std::vector<std::vector<double>> vals;
  for (const auto& r : rows) vals.push_back(parse_doubles(r, what));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vals.size()), static_cast<Eigen::Index>(vals[0].size()));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].size() != vals[0].size()) throw UsageError(what + " rows differ in length");
    for (std::size_t j = 0; j < vals[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[i][j];
  }
  return m;
}

[[nodiscard]] inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Parsed command line shared by every subcommand.
struct Options {
  // global
  std::string levels_text;
  std::optional<std::uint64_t> seed;
  std::size_t workers = default_workers();
  std::optional<std::string> cv_file;
  std::size_t cv_reps = kDefaultCvReps;
  std::size_t cv_tsim = kDefaultCvTsim;
  bool no_timestamp = false;
  std::optional<std::string> emit_csv;
  bool comma_decimal = false;
  std::optional<char> delimiter;
  bool index_col = false;

  // data selection
  std::string input;
  std::optional<std::string> col;
  std::string cols;
  std::string cause;
  std::string effect;
  std::string y;
  std::string x;

  // model settings
  std::size_t p = 1;
  std::size_t p_max = 8;
  std::size_t h = 8;
  std::size_t max_lag = 10;
  std::string criterion = "bic";
  std::string lags = "auto";
  std::string det = "drift";
  std::optional<std::int64_t> tau;
  double trim = kDefaultQlrTrim;
  std::string terms = "differences";
  std::optional<double> poos_split;

  // simulate
  std::string kind;
  std::size_t T = 0;
  double sigma2 = 1.0;
  double beta0 = 0.0;
  double beta0_after = 1.0;
  std::string betas;
  std::string alphas;
  double theta = 1.0;
  double alpha = 0.0;
  double noise_ar = 0.0;
  double corr = 0.0;
  std::size_t m = 1;
  double break_fraction = 0.5;
  std::optional<std::size_t> burn_in;
  std::vector<std::string> var_a;
  std::string var_delta;
  std::string names;

  // mc-critical
  std::string stat = "adf";
  std::size_t reps = kDefaultCvReps;
  bool save = false;
};

class App {
 public:
  App(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Time-series econometrics toolkit", "tsecon"};
    app.set_version_flag("--version", std::string(TSECON_VERSION));
    app.require_subcommand(1);
    app.fallthrough();
    add_global(app);
    auto subs = add_subcommands(app);
    try {
      app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out_ << TSECON_VERSION << '\n';
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "usage error: " << e.what() << '\n';
      return kUsageError;
    }
    CLI::App* sub = nullptr;
    for (auto* s : subs)
      if (s->parsed()) sub = s;
    try {
      levels_ = o_.levels_text.empty() ? kDefaultLevels : parse_doubles(o_.levels_text, "--levels");
      for (double l : levels_)
        if (!(l > 0.0 && l < 1.0)) throw UsageError("significance levels must lie in (0, 1)");
      if (o_.workers == 0) throw UsageError("--workers must be at least 1");
      report_ = io::Json::object();
      report_["schema_version"] = kSchemaVersion;
      report_["tool"] = io::Json{{"name", "tsecon"}, {"version", TSECON_VERSION}};
      report_["command"] = command_echo(app, *sub);
      report_["input"] = nullptr;
      report_["seeds"] = io::Json::object();
      dispatch(sub->get_name());
      report_["notes"] = notes_;
      if (!o_.no_timestamp) report_["generated_at"] = utc_timestamp();
      out_ << report_.dump(2) << '\n';
      return kOk;
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << '\n';
      return kUsageError;
    } catch (const DomainError& e) {
      err_ << "error: " << e.what() << '\n';
      return kDomainError;
    } catch (const NumericalError& e) {
      err_ << "error: " << e.what() << '\n';
      return kDomainError;
    }
  }

 private:
  void add_global(CLI::App& app) {
    app.add_option("--levels", o_.levels_text, "Significance levels, comma separated (default 0.1,0.05,0.01)");
    app.add_option("--seed", o_.seed, "Seed for every stochastic step");
    app.add_option("--workers", o_.workers, "Monte Carlo worker threads");
    app.add_option("--cv-file", o_.cv_file, "Critical-value cache (overrides TSECON_CV_FILE)");
    app.add_option("--cv-reps", o_.cv_reps, "Replications when critical values must be simulated");
    app.add_option("--cv-tsim", o_.cv_tsim, "Sample length of simulated critical values");
    app.add_flag("--no-timestamp", o_.no_timestamp, "Omit generated_at from the report");
    app.add_option("--emit-csv", o_.emit_csv, "Write forecasts, statistic paths or series to this CSV file");
    app.add_flag("--comma-decimal", o_.comma_decimal, "Input uses ',' as decimal mark (';' delimits fields)");
    app.add_option("--delimiter", o_.delimiter, "Input field delimiter");
    app.add_flag("--index-col", o_.index_col, "First input column is an index");
  }

  std::vector<CLI::App*> add_subcommands(CLI::App& app) {
    std::vector<CLI::App*> subs;
    auto data = [&](const char* name, const char* help) {
      auto* s = app.add_subcommand(name, help);
      s->add_option("input", o_.input, "CSV file")->required();
      subs.push_back(s);
      return s;
    };
    auto col = [&](CLI::App* s) { s->add_option("--col", o_.col, "Series to analyse"); };

    auto* describe = data("describe", "Sample mean, variance and autocorrelations");
    describe->add_option("--cols", o_.cols, "Columns, comma separated (default all)");
    describe->add_option("--max-lag", o_.max_lag, "Largest autocorrelation lag");

    auto* fit = data("fit-ar", "OLS AR(p) fit");
    col(fit);
    fit->add_option("--p", o_.p, "AR order");

    auto* sel = data("select-lag", "Information-criterion order selection (AR, or VAR with --cols)");
    col(sel);
    sel->add_option("--cols", o_.cols, "VAR variables, comma separated");
    sel->add_option("--p-max", o_.p_max, "Largest order considered");
    sel->add_option("--criterion", o_.criterion, "bic or aic")->check(CLI::IsMember({"bic", "aic"}));

    auto* fc = data("forecast", "Iterated AR(p) forecasts");
    col(fc);
    fc->add_option("--p", o_.p, "AR order");
    fc->add_option("--horizon", o_.h, "Forecast horizon");
    fc->add_option("--poos-split", o_.poos_split, "Also report pseudo out-of-sample RMSFE from this split fraction");

    auto* adf = data("adf", "Augmented Dickey-Fuller unit-root test");
    col(adf);
    adf->add_option("--lags", o_.lags, "auto, auto:N or a fixed count");
    adf->add_option("--det", o_.det, "none, drift or trend")->check(CLI::IsMember({"none", "drift", "trend"}));

    auto* chow = data("chow", "Chow break test at a known date");
    col(chow);
    chow->add_option("--p", o_.p, "AR order");
    chow->add_option("--tau", o_.tau, "Break period")->required();

    auto* qlr = data("qlr", "Quandt likelihood ratio test for an unknown break date");
    col(qlr);
    qlr->add_option("--p", o_.p, "AR order");
    qlr->add_option("--trim", o_.trim, "Trimming fraction");

    auto* fv = data("fit-var", "VAR(p) fit");
    fv->add_option("--cols", o_.cols, "Variables, comma separated")->required();
    fv->add_option("--p", o_.p, "Lag order");

    auto* fcv = data("forecast-var", "Iterated VAR(p) forecasts");
    fcv->add_option("--cols", o_.cols, "Variables, comma separated")->required();
    fcv->add_option("--p", o_.p, "Lag order");
    fcv->add_option("--horizon", o_.h, "Forecast horizon");

    auto* gr = data("granger", "Granger causality F-test");
    gr->add_option("--cause", o_.cause, "Candidate cause")->required();
    gr->add_option("--effect", o_.effect, "Predicted variable")->required();
    gr->add_option("--cols", o_.cols, "Further system variables");
    gr->add_option("--p", o_.p, "Lag order");

    auto* io = data("integration-order", "Classify I(0), I(1) or I(2) by an ADF ladder");
    col(io);
    io->add_option("--lags", o_.lags, "auto, auto:N or a fixed count");
    io->add_option("--det", o_.det, "none, drift or trend")->check(CLI::IsMember({"none", "drift", "trend"}));

    auto* co = data("coint", "Engle-Granger two-step cointegration test");
    co->add_option("--y", o_.y, "Dependent series")->required();
    co->add_option("--x", o_.x, "Regressors, comma separated (1 to 4)")->required();
    co->add_option("--lags", o_.lags, "Residual ADF lags: auto, auto:N or a fixed count");

    auto* dl = data("dols", "Dynamic OLS estimate of the cointegrating vector");
    dl->add_option("--y", o_.y, "Dependent series")->required();
    dl->add_option("--x", o_.x, "Regressors, comma separated")->required();
    dl->add_option("--p", o_.p, "Lead/lag window");
    dl->add_option("--terms", o_.terms, "differences, levels or none")
        ->check(CLI::IsMember({"differences", "levels", "none"}));

    auto* sim = app.add_subcommand("simulate", "Draw a series from a data-generating process");
    subs.push_back(sim);
    sim->add_option("--kind", o_.kind, "Process")
        ->required()
        ->check(CLI::IsMember({"white-noise", "ar", "ma", "arma", "random-walk", "random-walk-drift",
                               "independent-random-walks", "cointegrated-pair", "ar-break", "var"}));
    sim->add_option("--T", o_.T, "Length")->required();
    sim->add_option("--sigma2", o_.sigma2, "Innovation variance");
    sim->add_option("--beta0", o_.beta0, "Intercept, drift or mean");
    sim->add_option("--beta0-after", o_.beta0_after, "ar-break: intercept after the break");
    sim->add_option("--betas", o_.betas, "AR coefficients, comma separated");
    sim->add_option("--alphas", o_.alphas, "MA coefficients, comma separated");
    sim->add_option("--theta", o_.theta, "cointegrated-pair: slope");
    sim->add_option("--alpha", o_.alpha, "cointegrated-pair: intercept");
    sim->add_option("--noise-ar", o_.noise_ar, "cointegrated-pair: AR(1) coefficient of the equilibrium error");
    sim->add_option("--corr", o_.corr, "cointegrated-pair: innovation correlation");
    sim->add_option("--m", o_.m, "independent-random-walks: number of regressors");
    sim->add_option("--break-fraction", o_.break_fraction, "ar-break: break location");
    sim->add_option("--burn-in", o_.burn_in, "Discarded start-up draws");
    sim->add_option("--A", o_.var_a, "var: coefficient matrix 'a,b;c,d', once per lag");
    sim->add_option("--delta", o_.var_delta, "var: intercept vector");
    sim->add_option("--names", o_.names, "Column names, comma separated");

    auto* mc = app.add_subcommand("mc-critical", "Monte Carlo critical values");
    subs.push_back(mc);
    mc->add_option("--stat", o_.stat, "adf, eg_adf or qlr");
    mc->add_option("--det", o_.det, "adf: none, drift or trend")->check(CLI::IsMember({"none", "drift", "trend"}));
    mc->add_option("--lags", o_.lags, "adf, eg_adf: lag policy");
    mc->add_option("--m", o_.m, "eg_adf: number of regressors");
    mc->add_option("--p", o_.p, "qlr: AR order");
    mc->add_option("--trim", o_.trim, "qlr: trimming fraction");
    mc->add_option("--T", o_.T, "Simulated sample length (default 500)");
    mc->add_option("--reps", o_.reps, "Replications");
    mc->add_flag("--save", o_.save, "Store the result in the critical-value cache");
    return subs;
  }

  // Options as given, minus those that cannot change the result.
  static io::Json command_echo(const CLI::App& app, const CLI::App& sub) {
    static const std::set<std::string> skip{"workers", "no-timestamp", "help", "version"};
    io::Json opts = io::Json::object();
    auto collect = [&](const CLI::App& a) {
      for (const auto* opt : a.get_options()) {
        if (opt->count() == 0) continue;
        std::string name = opt->get_name(false, true);
        while (!name.empty() && name[0] == '-') name.erase(0, 1);
        if (skip.count(name)) continue;
        const auto& res = opt->results();
        if (opt->get_expected_max() == 0) {
          opts[name] = true;
        } else if (res.size() == 1 && opt->get_items_expected_max() <= 1) {
          opts[name] = res[0];
        } else {
          opts[name] = res;
        }
      }
    };
    collect(app);
    collect(sub);
    return io::Json{{"name", sub.get_name()}, {"options", opts}};
  }

  void dispatch(const std::string& name) {
    if (name == "describe") return describe();
    if (name == "fit-ar") return fit_ar_cmd();
    if (name == "select-lag") return select_lag();
    if (name == "forecast") return forecast();
    if (name == "adf") return adf();
    if (name == "chow") return chow();
    if (name == "qlr") return qlr();
    if (name == "fit-var") return fit_var_cmd();
    if (name == "forecast-var") return forecast_var_cmd();
    if (name == "granger") return granger();
    if (name == "integration-order") return integration();
    if (name == "coint") return coint();
    if (name == "dols") return dols_cmd();
    if (name == "simulate") return simulate_cmd();
    if (name == "mc-critical") return mc_critical();
    throw UsageError("unknown subcommand '" + name + "'");
  }

  // ---- input -----------------------------------------------------------

  io::Dataset load(const std::vector<std::string>& targets) {
    std::ifstream in(o_.input, std::ios::binary);
    if (!in) throw DomainError("cannot read '" + o_.input + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    io::CsvOptions opt;
    opt.delimiter = o_.delimiter;
    opt.comma_decimal = o_.comma_decimal;
    opt.index_column = o_.index_col;
    opt.targets = targets;
    std::istringstream is(bytes);
    auto ds = io::parse_csv(is, opt, o_.input);
    report_["input"] = io::Json{{"path", o_.input},
                                {"sha256", sha256_hex(bytes)},
                                {"rows", ds.parse_report.rows},
                                {"columns", ds.columns.names()},
                                {"first_period", ds.columns.first_period()},
                                {"ignored_columns", ds.parse_report.ignored_columns},
                                {"notes", ds.parse_report.notes}};
    return ds;
  }

  // The single series named by --col, or the only numeric column.
  TimeSeries single() {
    if (o_.col) return load({*o_.col}).columns.at(*o_.col);
    auto ds = load({});
    if (ds.columns.width() != 1) {
      throw UsageError("--col is required: the input has " + std::to_string(ds.columns.width()) + " numeric columns");
    }
    return ds.columns.column(0);
  }

  std::vector<std::string> list(const std::string& s, const char* flag) const {
    auto v = split(s, ',');
    if (v.empty()) throw UsageError(std::string(flag) + " needs at least one column name");
    return v;
  }

  // ---- critical values -----------------------------------------------------

  std::uint64_t cv_seed() {
    const std::uint64_t s = o_.seed.value_or(kDefaultCvSeed);
    report_["seeds"]["cv_seed"] = s;
    return s;
  }

  std::uint64_t sim_seed() {
    std::uint64_t s = 0;
    if (o_.seed) {
      s = *o_.seed;
    } else {
      std::random_device rd;
      s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      report_["seeds"]["generated"] = true;
    }
    report_["seeds"]["seed"] = s;
    return s;
  }

  CriticalValues simulated_cvs(CvRequest req) {
    req.t_sim = o_.cv_tsim;
    req.reps = o_.cv_reps;
    req.seed = cv_seed();
    const char* env = std::getenv(kCvFileEnv);
    const bool explicit_path = o_.cv_file || (env != nullptr && *env != '\0');
    const std::string path = resolve_cv_path(o_.cv_file, TSECON_DEFAULT_CV_FILE);
    auto cache = CriticalValueCache::load(path);
    bool updated = false;
    const auto cvs = critical_values_for(cache, req, levels_, o_.workers, &updated);
    if (updated) {
      if (explicit_path) {
        cache.save(path);
        err_ << "note: simulated critical values for " << req.key() << " stored in " << path << '\n';
      } else {
        err_ << "note: simulated critical values for " << req.key() << " (not cached; pass --cv-file to keep them)\n";
      }
    }
    report_["critical_value_entry"] = req.key();
    return cvs;
  }

  void emit_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    if (!o_.emit_csv) return;
    std::ofstream f(*o_.emit_csv, std::ios::trunc);
    if (!f) throw DomainError("cannot write '" + *o_.emit_csv + "'");
    for (std::size_t c = 0; c < header.size(); ++c) f << (c ? "," : "") << header[c];
    f << '\n';
    const std::size_t n = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < columns.size(); ++c) f << (c ? "," : "") << detail::shortest(columns[c][r]);
      f << '\n';
    }
    if (!f) throw DomainError("failed writing '" + *o_.emit_csv + "'");
    report_["emitted_csv"] = *o_.emit_csv;
  }

  // ---- subcommands -------------------------------------------------------

  void describe() {
    const auto ds = load(o_.cols.empty() ? std::vector<std::string>{} : list(o_.cols, "--cols"));
    io::Json out = io::Json::array();
    for (std::size_t i = 0; i < ds.columns.width(); ++i) {
      const auto& s = ds.columns.column(i);
      const std::size_t k = std::min(o_.max_lag, s.size() >= 2 ? s.size() - 2 : 0);
      const auto m = sample_moments(s, k);
      io::Json ac = io::Json::array();
      for (const auto& r : m.autocorrelations) ac.push_back(r ? io::number(*r) : io::Json(nullptr));
      out.push_back(io::Json{{"name", s.name()},
                             {"n", s.size()},
                             {"mean", io::number(m.mean)},
                             {"variance", io::number(m.variance)},
                             {"autocovariances", io::to_json(m.autocovariances)},
                             {"autocorrelations", ac}});
    }
    report_["result"] = io::Json{{"series", out}};
  }

  void fit_ar_cmd() {
    const auto y = single();
    report_["result"] = io::to_json(fit_ar(y, o_.p));
  }

  void select_lag() {
    const auto c = o_.criterion == "aic" ? Criterion::aic : Criterion::bic;
    if (!o_.cols.empty()) {
      const auto names = list(o_.cols, "--cols");
      report_["result"] = io::Json{{"model", "var"}, {"table", io::to_json(select_var_order(load(names).columns, o_.p_max, c))}};
      return;
    }
    report_["result"] = io::Json{{"model", "ar"}, {"table", io::to_json(select_ar_order(single(), o_.p_max, c))}};
  }

  void forecast() {
    const auto y = single();
    const auto fit = fit_ar(y, o_.p);
    const auto f = forecast_ar(fit, y, o_.h);
    const std::int64_t next = y.period(y.size() - 1) + 1;
    io::Json r{{"fit", io::to_json(fit)}, {"forecast", io::to_json(f, next)}};
    if (o_.poos_split) r["pseudo_out_of_sample_rmsfe"] = io::number(pseudo_out_of_sample_rmsfe(y, o_.p, *o_.poos_split));
    report_["result"] = r;
    std::vector<double> hs;
    std::vector<double> periods;
    for (std::size_t h = 1; h <= o_.h; ++h) {
      hs.push_back(static_cast<double>(h));
      periods.push_back(static_cast<double>(next + static_cast<std::int64_t>(h) - 1));
    }
    emit_csv({"h", "period", y.name()}, {hs, periods, f.point_forecasts});
  }

  LagPolicy lag_policy() const {
    try {
      return LagPolicy::parse(o_.lags);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }

  AdfSpec adf_spec() const { return AdfSpec{lag_policy(), parse_deterministic(o_.det)}; }

  CvRequest adf_request() const {
    CvRequest req;
    req.kind = StatisticKind::adf;
    req.deterministic = parse_deterministic(o_.det);
    req.lags = lag_policy();
    return req;
  }

  void adf() {
    const auto y = single();
    const auto spec = adf_spec();
    const auto cvs = simulated_cvs(adf_request());
    report_["result"] = io::to_json(adf_test(y, spec, cvs, levels_));
  }

  void chow() {
    const auto y = single();
    report_["result"] = io::to_json(chow_test(y, o_.p, *o_.tau, levels_));
  }

  void qlr() {
    const auto y = single();
    CvRequest req;
    req.kind = StatisticKind::qlr;
    req.ar_order = o_.p;
    req.trim = o_.trim;
    (void)qlr_window(y, o_.p, o_.trim);
    const auto cvs = simulated_cvs(req);
    const auto r = qlr_test(y, o_.p, o_.trim, cvs, levels_);
    report_["result"] = io::to_json(r);
    std::vector<double> taus;
    std::vector<double> fs;
    for (const auto& [tau, f] : r.statistic_path) {
      taus.push_back(static_cast<double>(tau));
      fs.push_back(f);
    }
    emit_csv({"tau", "F"}, {taus, fs});
  }

  void fit_var_cmd() {
    const auto ds = load(list(o_.cols, "--cols"));
    report_["result"] = io::to_json(fit_var(ds.columns, o_.p));
  }

  void forecast_var_cmd() {
    const auto ds = load(list(o_.cols, "--cols"));
    const auto fit = fit_var(ds.columns, o_.p);
    const auto f = forecast_var(fit, ds.columns, o_.h);
    const std::int64_t next = ds.columns.first_period() + static_cast<std::int64_t>(ds.columns.length());
    io::Json fj = io::Json::object();
    for (std::size_t i = 0; i < f.size(); ++i) fj[fit.names[i]] = io::to_json(f[i], next);
    report_["result"] = io::Json{{"fit", io::to_json(fit)}, {"forecasts", fj}};
    std::vector<std::string> header{"h", "period"};
    std::vector<std::vector<double>> cols(2);
    for (std::size_t h = 1; h <= o_.h; ++h) {
      cols[0].push_back(static_cast<double>(h));
      cols[1].push_back(static_cast<double>(next + static_cast<std::int64_t>(h) - 1));
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      header.push_back(fit.names[i]);
      cols.push_back(f[i].point_forecasts);
    }
    emit_csv(header, cols);
  }

  void granger() {
    std::vector<std::string> names{o_.cause, o_.effect};
    if (o_.cause == o_.effect) throw UsageError("--cause and --effect must differ");
    for (const auto& n : split(o_.cols, ','))
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    const auto ds = load(names);
    report_["result"] = io::to_json(granger_test(ds.columns, o_.cause, o_.effect, o_.p, levels_));
  }

  void integration() {
    const auto y = single();
    const auto cvs = simulated_cvs(adf_request());
    const auto res = integration_order(y, adf_spec(), cvs, levels_.size() == 1 ? levels_[0] : 0.05);
    io::Json steps = io::Json::array();
    for (const auto& s : res.steps) steps.push_back(io::to_json(s));
    report_["result"] = io::Json{{"order", to_string(res.order)}, {"decision_level", levels_.size() == 1 ? levels_[0] : 0.05},
                                 {"steps", steps}};
  }

  std::pair<TimeSeries, std::vector<TimeSeries>> regression_inputs() {
    const auto xs = list(o_.x, "--x");
    std::vector<std::string> names{o_.y};
    names.insert(names.end(), xs.begin(), xs.end());
    const auto ds = load(names);
    std::vector<TimeSeries> regs;
    for (const auto& n : xs) regs.push_back(ds.columns.at(n));
    return {ds.columns.at(o_.y), regs};
  }

  void coint() {
    const auto [y, xs] = regression_inputs();
    report_["result"] = io::to_json(eg_adf_test(y, xs, levels_, lag_policy()));
  }

  void dols_cmd() {
    const auto [y, xs] = regression_inputs();
    const auto terms = o_.terms == "levels" ? DolsTerms::levels : o_.terms == "none" ? DolsTerms::none : DolsTerms::differences;
    report_["result"] = io::to_json(dols(y, xs, o_.p, terms));
  }

  DgpKind dgp_kind() const {
    const auto betas = parse_doubles(o_.betas, "--betas");
    const auto alphas = parse_doubles(o_.alphas, "--alphas");
    const auto& k = o_.kind;
    if (k == "white-noise") return dgp::WhiteNoise{o_.beta0};
    if (k == "ar") {
      if (betas.empty()) throw UsageError("--kind ar needs --betas");
      return dgp::Ar{o_.beta0, betas};
    }
    if (k == "ma") return dgp::Ma{o_.beta0, alphas};
    if (k == "arma") return dgp::Arma{o_.beta0, betas, alphas};
    if (k == "random-walk") return dgp::RandomWalk{};
    if (k == "random-walk-drift") return dgp::RandomWalkDrift{o_.beta0};
    if (k == "independent-random-walks") return dgp::IndependentRandomWalks{o_.m + 1};
    if (k == "cointegrated-pair") return dgp::CointegratedPair{o_.theta, o_.alpha, o_.beta0, o_.noise_ar, o_.corr};
    if (k == "ar-break") {
      if (betas.empty()) throw UsageError("--kind ar-break needs --betas");
      return dgp::ArBreak{o_.beta0, o_.beta0_after, betas, o_.break_fraction};
    }
    // var
    if (o_.var_a.empty()) throw UsageError("--kind var needs --A once per lag");
    VarParams P;
    for (const auto& a : o_.var_a) P.A.push_back(parse_matrix(a, "--A"));
    const auto kk = P.A[0].rows();
    if (o_.var_delta.empty()) {
      P.delta = Eigen::VectorXd::Zero(kk);
    } else {
      const auto d = parse_doubles(o_.var_delta, "--delta");
      P.delta = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
    }
    P.sigma = Eigen::MatrixXd::Identity(kk, kk) * o_.sigma2;
    P.validate();
    return dgp::Var{P, {}};
  }

  void simulate_cmd() {
    DgpSpec spec = make_dgp(dgp_kind(), sim_seed(), o_.sigma2);
    spec.burn_in = o_.burn_in;
    auto data = simulate(spec, o_.T);
    if (!o_.names.empty()) {
      const auto names = list(o_.names, "--names");
      if (names.size() != data.width()) {
        throw UsageError("--names lists " + std::to_string(names.size()) + " names for " + std::to_string(data.width()) +
                         " series");
      }
      MultiSeries renamed;
      for (std::size_t i = 0; i < names.size(); ++i) renamed.add(data.column(i).relabeled(names[i]));
      data = renamed;
    }
    io::Json values = io::Json::object();
    std::vector<std::string> header{"t"};
    std::vector<std::vector<double>> cols(1);
    for (std::size_t t = 0; t < data.length(); ++t) cols[0].push_back(static_cast<double>(data.first_period() + static_cast<std::int64_t>(t)));
    for (std::size_t i = 0; i < data.width(); ++i) {
      const auto& s = data.column(i);
      std::vector<double> v(s.values().begin(), s.values().end());
      values[s.name()] = io::to_json(v);
      header.push_back(s.name());
      cols.push_back(std::move(v));
    }
    report_["result"] = io::Json{{"kind", spec.kind_name()},
                                 {"T", o_.T},
                                 {"sigma2", o_.sigma2},
                                 {"burn_in", spec.effective_burn_in()},
                                 {"rng", std::string(kRngName)},
                                 {"first_period", data.first_period()},
                                 {"series", values}};
    emit_csv(header, cols);
  }

  void mc_critical() {
    CvRequest req;
    try {
      req.kind = parse_statistic_kind(o_.stat);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    req.deterministic = parse_deterministic(o_.det);
    req.lags = lag_policy();
    req.n_regressors = o_.m;
    req.ar_order = o_.p;
    req.trim = o_.trim;
    req.t_sim = o_.T == 0 ? kDefaultCvTsim : o_.T;
    req.reps = o_.reps;
    req.seed = sim_seed();
    std::vector<double> levels = levels_;
    for (double l : kCachedLevels)
      if (std::find(levels.begin(), levels.end(), l) == levels.end()) levels.push_back(l);
    const auto run = mc_critical_values(req, levels, o_.workers);
    io::Json r = io::to_json(run);
    if (req.kind == StatisticKind::eg_adf) {
      io::Json pub = io::Json::object();
      for (const auto& [l, v] : engle_granger_critical_values(req.n_regressors).by_level) pub[io::level_key(l)] = v;
      r["published"] = pub;
    }
    report_["result"] = r;
    if (o_.save) {
      const std::string path = resolve_cv_path(o_.cv_file, TSECON_DEFAULT_CV_FILE);
      auto cache = CriticalValueCache::load(path);
      const auto cv = run.critical_values();
      cache.store(req.key(), CvEntry{cv.tail, cv.by_level, cv.provenance});
      cache.save(path);
      report_["saved_to"] = path;
    }
  }

  std::ostream& out_;
  std::ostream& err_;
  Options o_;
  std::vector<double> levels_;
  io::Json report_;
  std::vector<std::string> notes_;
};

/// Run one command line (program name excluded); returns the exit status.
[[nodiscard]] inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                                     std::ostream& err = std::cerr) {
  App app(out, err);
  return app.run(args);
}

}  // namespace tsecon::cli
