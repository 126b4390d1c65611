#pragma once

/// CSV ingestion into named series.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsecon/errors.hpp"
#include "tsecon/series.hpp"

namespace tsecon::io {

struct CsvOptions {
  /// Defaults to ';' when comma_decimal is set, ',' otherwise.
  std::optional<char> delimiter;
  /// Accept "3,14" as 3.14.
  bool comma_decimal = false;
  /// Treat the first column as an index; integer consecutive values set the first period.
  bool index_column = false;
  /// Columns that must be present and complete; empty means every numeric column.
  std::vector<std::string> targets;

  [[nodiscard]] char effective_delimiter() const { return delimiter.value_or(comma_decimal ? ';' : ','); }
};

struct ParseReport {
  std::size_t rows = 0;
  std::vector<std::string> ignored_columns;
  std::vector<std::string> notes;
};

struct Dataset {
  MultiSeries columns;
  std::string source;
  ParseReport parse_report;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// One logical record; quoted fields may contain delimiters, doubled quotes and newlines.
inline bool read_record(std::istream& in, char delim, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (!quoted) break;
      std::string more;
      if (!std::getline(in, more)) throw DomainError("unterminated quoted field at line " + std::to_string(line_no));
      ++line_no;
      cur += '\n';
      line = more;
      i = static_cast<std::size_t>(-1);
      continue;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return true;
}

inline std::optional<double> parse_number(std::string cell, bool comma_decimal) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (comma_decimal) std::replace(cell.begin(), cell.end(), ',', '.');
  const char* first = cell.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string row_list(const std::vector<std::size_t>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < rows.size() && i < 20; ++i) os << (i ? ", " : "") << rows[i];
  if (rows.size() > 20) os << ", ... (" << rows.size() << " rows)";
  return os.str();
}

}  // namespace detail

/// Parse CSV text. `source` names the input in messages.
[[nodiscard]] inline Dataset parse_csv(std::istream& in, const CsvOptions& opt, const std::string& source = "<input>") {
  const char delim = opt.effective_delimiter();
  if (opt.comma_decimal && delim == ',') throw DomainError("comma-decimal input needs a delimiter other than ','");

  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!detail::read_record(in, delim, header, line_no)) throw DomainError("'" + source + "' is empty: header row required");
  for (auto& h : header) h = detail::trim(h);
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) header[0].erase(0, 3);

  std::vector<std::vector<std::string>> cells(header.size());
  std::vector<std::size_t> line_of_row;
  std::vector<std::string> rec;
  while (detail::read_record(in, delim, rec, line_no)) {
    if (rec.size() == 1 && detail::trim(rec[0]).empty()) continue;
    if (rec.size() != header.size()) {
      throw DomainError("non-rectangular data: line " + std::to_string(line_no) + " has " + std::to_string(rec.size()) +
                        " fields, header has " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < rec.size(); ++c) cells[c].push_back(rec[c]);
    line_of_row.push_back(line_no);
  }
  const std::size_t n = line_of_row.size();
  if (n == 0) throw DomainError("'" + source + "' has a header but no data rows");

  Dataset ds;
  ds.source = source;
  ds.parse_report.rows = n;

  std::vector<std::string> names(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    names[c] = header[c].empty() ? "col" + std::to_string(c + 1) : header[c];
    for (std::size_t d = 0; d < c; ++d)
      if (names[d] == names[c]) throw DomainError("duplicate column name '" + names[c] + "'");
  }
  for (const auto& t : opt.targets) {
    if (std::find(names.begin(), names.end(), t) == names.end()) throw DomainError("unknown column '" + t + "'");
  }

  std::optional<std::int64_t> origin;
  const std::size_t first_data = opt.index_column ? 1 : 0;
  if (opt.index_column) {
    if (header.size() < 2) throw DomainError("index column requested but the file has a single column");
    std::vector<std::int64_t> idx;
    for (const auto& cell : cells[0]) {
      const auto v = detail::parse_number(cell, false);
      if (!v || std::floor(*v) != *v) break;
      idx.push_back(static_cast<std::int64_t>(*v));
    }
    bool consecutive = idx.size() == n;
    for (std::size_t i = 1; consecutive && i < idx.size(); ++i) consecutive = idx[i] == idx[i - 1] + 1;
    if (consecutive) {
      origin = idx.front();
    } else {
      ds.parse_report.notes.push_back("index column '" + names[0] + "' ignored for period numbering");
    }
  }

  for (std::size_t c = first_data; c < header.size(); ++c) {
    const bool target =
        opt.targets.empty() || std::find(opt.targets.begin(), opt.targets.end(), names[c]) != opt.targets.end();
    std::vector<double> values(n);
    std::vector<std::size_t> blank;
    std::vector<std::size_t> bad;
    for (std::size_t r = 0; r < n; ++r) {
      const auto v = detail::parse_number(cells[c][r], opt.comma_decimal);
      if (v) {
        values[r] = *v;
      } else if (detail::trim(cells[c][r]).empty()) {
        blank.push_back(line_of_row[r]);
      } else {
        bad.push_back(line_of_row[r]);
      }
    }
    if (!bad.empty()) {
      if (!opt.targets.empty() && target) {
        throw DomainError("column '" + names[c] + "' is not numeric (lines " + detail::row_list(bad) + ")");
      }
      ds.parse_report.ignored_columns.push_back(names[c]);
      ds.parse_report.notes.push_back("non-numeric column '" + names[c] + "' ignored");
      continue;
    }
    if (!target) continue;
    if (!blank.empty()) {
      throw DomainError("missing values in column '" + names[c] + "' at lines " + detail::row_list(blank));
    }
    ds.columns.add(TimeSeries(std::move(values), names[c], origin));
  }
  if (ds.columns.width() == 0) throw DomainError("'" + source + "' has no usable numeric columns");
  if (!opt.targets.empty()) ds.columns = ds.columns.select(opt.targets);
  return ds;
}

[[nodiscard]] inline Dataset ingest_csv(const std::string& path, const CsvOptions& opt = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read '" + path + "'");
  return parse_csv(in, opt, path);
}

}  // namespace tsecon::io
