#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "earthworm/error.hpp"
#include "earthworm/site.hpp"
#include "earthworm/sweep.hpp"

namespace earthworm {

inline constexpr int kTableSchema = 1;
inline constexpr const char* kTableHeader = "dim,n,replica,seed,s_n,created_total,tan_total,walltime_ms";

// Sample table CSV. The first line is `# schema=1`; walltime_ms is the last
// column and the only one that varies between identical runs. Failed rows
// keep their key columns and leave the measurements empty.
inline void write_table_csv(std::ostream& out, const SampleTable& table) {
  out << "# schema=" << kTableSchema << '\n' << kTableHeader << '\n';
  char wall[32];
  for (const auto& r : table.rows) {
    out << r.dim << ',' << r.n << ',' << r.replica << ',' << r.seed << ',';
    if (!r.error) {
      out << r.s_n << ',' << r.created_total << ',';
      if (r.tan_total) out << *r.tan_total;
    } else {
      out << ",,";
    }
    std::snprintf(wall, sizeof wall, "%.3f", r.walltime_ms);
    out << ',' << (r.error ? "" : wall) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::uint64_t parse_u64(const std::string& s, const char* column, std::size_t line_no) {
  try {
    std::size_t used = 0;
    if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("line " + std::to_string(line_no) + ": column '" + column + "' is not an unsigned integer");
  }
}

}  // namespace detail

inline SampleTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# schema=", 0) != 0) {
    throw FormatError("missing '# schema=' line");
  }
  if (line != "# schema=" + std::to_string(kTableSchema)) {
    throw FormatError("unsupported table schema '" + line.substr(9) + "'");
  }
  if (!std::getline(in, line) || line != kTableHeader) throw FormatError("unexpected table header");

  SampleTable table;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != 8) throw FormatError("line " + std::to_string(line_no) + ": expected 8 columns");
    SampleRow r;
    r.dim = static_cast<int>(detail::parse_u64(f[0], "dim", line_no));
    r.n = detail::parse_u64(f[1], "n", line_no);
    r.replica = detail::parse_u64(f[2], "replica", line_no);
    r.seed = detail::parse_u64(f[3], "seed", line_no);
    if (f[4].empty()) {
      r.error = "failed";
    } else {
      r.s_n = detail::parse_u64(f[4], "s_n", line_no);
      r.created_total = detail::parse_u64(f[5], "created_total", line_no);
      if (!f[6].empty()) r.tan_total = detail::parse_u64(f[6], "tan_total", line_no);
      try {
        r.walltime_ms = std::stod(f[7]);
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(line_no) + ": column 'walltime_ms' is not a number");
      }
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

// Holes dump: one site per line, coordinates separated by single spaces.
template <int D>
void write_sites(std::ostream& out, const std::vector<Site<D>>& sites) {
  for (const auto& s : sites) {
    for (int a = 0; a < D; ++a) out << (a ? " " : "") << s[a];
    out << '\n';
  }
}

// Reads a sites file; every non-empty line must have the same number of
// coordinates. Returns the coordinates and sets `dim`.
inline std::vector<std::vector<std::int64_t>> read_sites(std::istream& in, int& dim) {
  std::vector<std::vector<std::int64_t>> out;
  std::string line;
  std::size_t line_no = 0;
  dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::int64_t> coords;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        coords.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError("sites line " + std::to_string(line_no) + ": bad coordinate '" + tok + "'");
      }
    }
    if (coords.empty()) continue;
    if (dim == 0) dim = static_cast<int>(coords.size());
    if (static_cast<int>(coords.size()) != dim) {
      throw FormatError("sites line " + std::to_string(line_no) + ": inconsistent dimension");
    }
    out.push_back(std::move(coords));
  }
  return out;
}

}  // namespace earthworm
