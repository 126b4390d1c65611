#pragma once

/// Versioned, human-readable critical-value cache shared by the unit-root,
/// break and cointegration tests.
///
/// File layout (one block per entry):
///
///     tsecon-cv-cache 1
///     rng mt19937_64+splitmix64-streams+polar-normal/1
///     entry adf|det=drift|lags=auto|T=500|reps=100000|seed=20150420
///     tail left
///     source monte_carlo
///     level 0.05 -2.8621...
///     end
///
/// Published EG-ADF values are always written with `source published_table`.
/// Monte Carlo entries recorded under a different rng line are discarded on load.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsecon/cointegration.hpp"
#include "tsecon/errors.hpp"
#include "tsecon/monte_carlo.hpp"
#include "tsecon/random.hpp"
#include "tsecon/test_report.hpp"

namespace tsecon {

inline constexpr const char* kCvFileMagic = "tsecon-cv-cache";
inline constexpr int kCvFileVersion = 1;
inline constexpr const char* kCvFileEnv = "TSECON_CV_FILE";

struct CvEntry {
  Tail tail = Tail::left;
  std::map<double, double> by_level;
  CvProvenance provenance;
};

[[nodiscard]] inline std::string engle_granger_key(std::size_t n_regressors) {
  return "eg_adf|m=" + std::to_string(n_regressors) + "|published";
}

namespace detail {

// Shortest decimal text that reads back as exactly `v`.
inline std::string shortest(double v) {
  for (int prec = 1; prec <= std::numeric_limits<double>::max_digits10; ++prec) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    if (std::stod(os.str()) == v) return os.str();
  }
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

// Recovers seed/reps/T from a Monte Carlo key.
inline provenance::MonteCarlo provenance_from_key(const std::string& key) {
  provenance::MonteCarlo mc;
  mc.rng = std::string(kRngName);
  std::istringstream is(key);
  std::string field;
  while (std::getline(is, field, '|')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const auto name = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (name == "T") mc.t_sim = std::stoul(value);
    if (name == "reps") mc.reps = std::stoul(value);
    if (name == "seed") mc.seed = std::stoull(value);
  }
  return mc;
}

}  // namespace detail

class CriticalValueCache {
 public:
  CriticalValueCache() { add_published(); }

  [[nodiscard]] static CriticalValueCache load(const std::string& path) {
    CriticalValueCache cache;
    std::ifstream in(path);
    if (!in) return cache;
    cache.parse(in, path);
    return cache;
  }

  [[nodiscard]] static CriticalValueCache parse_text(const std::string& text) {
    CriticalValueCache cache;
    std::istringstream in(text);
    cache.parse(in, "<string>");
    return cache;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DomainError("cannot write critical-value file '" + path + "'");
    out << serialize();
    if (!out) throw DomainError("failed writing critical-value file '" + path + "'");
  }

  [[nodiscard]] std::string serialize() const {
    std::ostringstream os;
    os << kCvFileMagic << ' ' << kCvFileVersion << '\n';
    os << "rng " << kRngName << '\n';
    for (const auto& [key, e] : entries_) {
      os << "entry " << key << '\n';
      os << "tail " << (e.tail == Tail::left ? "left" : "right") << '\n';
      if (const auto* t = std::get_if<provenance::PublishedTable>(&e.provenance)) {
        os << "source published_table " << t->table << '\n';
      } else {
        os << "source monte_carlo\n";
      }
      for (const auto& [level, value] : e.by_level) os << "level " << detail::shortest(level) << ' ' << detail::shortest(value) << '\n';
      os << "end\n";
    }
    return os.str();
  }

  [[nodiscard]] const CvEntry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  void store(const std::string& key, CvEntry entry) { entries_[key] = std::move(entry); }

  [[nodiscard]] const std::map<std::string, CvEntry>& entries() const noexcept { return entries_; }

 private:
  void add_published() {
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto cv = engle_granger_critical_values(m);
      entries_[engle_granger_key(m)] = CvEntry{cv.tail, cv.by_level, cv.provenance};
    }
  }

  void parse(std::istream& in, const std::string& origin) {
    auto fail = [&](std::size_t line_no, const std::string& why) {
      throw DomainError("malformed critical-value file '" + origin + "' line " + std::to_string(line_no) + ": " + why);
    };
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return;
    ++line_no;
    {
      std::istringstream hs(line);
      std::string magic;
      int version = 0;
      hs >> magic >> version;
      if (magic != kCvFileMagic) fail(line_no, "missing header");
      if (version != kCvFileVersion) fail(line_no, "unsupported version " + std::to_string(version));
    }
    std::string rng;
    std::optional<std::string> key;
    CvEntry current;
    bool published = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const auto sp = line.find(' ');
      const std::string word = line.substr(0, sp);
      const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
      if (word == "rng") {
        rng = rest;
      } else if (word == "entry") {
        if (key) fail(line_no, "entry without end");
        key = rest;
        current = CvEntry{};
        published = false;
      } else if (!key) {
        fail(line_no, "field outside an entry");
      } else if (word == "tail") {
        if (rest != "left" && rest != "right") fail(line_no, "tail must be left or right");
        current.tail = rest == "left" ? Tail::left : Tail::right;
      } else if (word == "source") {
        if (rest.rfind("published_table", 0) == 0) {
          published = true;
          current.provenance = provenance::PublishedTable{rest.size() > 16 ? rest.substr(16) : ""};
        } else if (rest == "monte_carlo") {
          current.provenance = detail::provenance_from_key(*key);
        } else {
          fail(line_no, "unknown source '" + rest + "'");
        }
      } else if (word == "level") {
        std::istringstream ls(rest);
        double level = 0.0;
        double value = 0.0;
        if (!(ls >> level >> value)) fail(line_no, "level line needs two numbers");
        current.by_level[level] = value;
      } else if (word == "end") {
        // Published values are rebuilt from the built-in table; stale Monte
        // Carlo entries are dropped.
        if (!published && rng == kRngName) entries_[*key] = current;
        key.reset();
      } else {
        fail(line_no, "unknown field '" + word + "'");
      }
    }
    if (key) fail(line_no, "unterminated entry");
  }

  std::map<std::string, CvEntry> entries_;
};

/// --cv-file, else the TSECON_CV_FILE environment variable, else `fallback`.
[[nodiscard]] inline std::string resolve_cv_path(const std::optional<std::string>& flag, const std::string& fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kCvFileEnv); env != nullptr && *env != '\0') return env;
  return fallback;
}

/// Critical values for `req` at `levels`, simulated and cached if absent.
/// Returns whether the cache changed through `updated`.
[[nodiscard]] inline CriticalValues critical_values_for(CriticalValueCache& cache, const CvRequest& req,
                                                        const std::vector<double>& levels,
                                                        std::size_t workers = default_workers(),
                                                        bool* updated = nullptr) {
  if (updated) *updated = false;
  const auto key = req.key();
  if (const auto* e = cache.find(key)) {
    bool complete = true;
    for (double l : levels) {
      bool found = false;
      for (const auto& [have, v] : e->by_level) found = found || std::abs(have - l) < 1e-12;
      complete = complete && found;
    }
    if (complete) return CriticalValues{e->tail, e->by_level, e->provenance};
  }
  std::vector<double> all = kCachedLevels;
  if (const auto* e = cache.find(key)) {
    for (const auto& [l, v] : e->by_level) all.push_back(l);
  }
  all.insert(all.end(), levels.begin(), levels.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            all.end());
  const auto run = mc_critical_values(req, all, workers);
  auto cv = run.critical_values();
  cache.store(key, CvEntry{cv.tail, cv.by_level, cv.provenance});
  if (updated) *updated = true;
  return cv;
}

}  // namespace tsecon
