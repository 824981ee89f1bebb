#pragma once

// Risk-table CSV: header theta_norm,estimator,risk_hat,std_err,n_reps,seed,
// LF line endings, optional '#' comment lines before the header. Reals are
// written with 17 significant digits so a table re-parses to identical cells.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "steinrisk/risk.hpp"

namespace steinrisk::csv {

inline constexpr std::string_view kRiskHeader = "theta_norm,estimator,risk_hat,std_err,n_reps,seed";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_risk_table(std::ostream& os, const std::vector<RiskPoint>& points,
                             const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) os << "# " << c << '\n';
  os << kRiskHeader << '\n';
  for (const auto& p : points) {
    os << format_real(p.theta_norm) << ',' << p.estimator_name << ',' << format_real(p.risk_hat) << ','
       << format_real(p.std_err) << ',' << p.n_reps << ',' << p.seed << '\n';
  }
}

/// Cells of the given estimators, in curve order (theta-major).
inline std::vector<RiskPoint> select(const RiskCurve& curve, const std::vector<std::string>& names) {
  std::vector<RiskPoint> out;
  for (std::size_t t = 0; t < curve.theta_grid().size(); ++t)
    for (const auto& n : names) {
      const auto idx = curve.index_of(n);
      if (!idx) throw std::invalid_argument("csv::select: no estimator named " + n);
      out.push_back(curve.at(*idx, t));
    }
  return out;
}

struct RiskTable {
  std::vector<std::string> comments;
  std::vector<RiskPoint> points;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == ',') {
      f.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return f;
}

inline double parse_real(std::string_view s, std::size_t line_no) {
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad real '" + tmp + "'");
  return v;
}

template <class Int>
Int parse_int(std::string_view s, std::size_t line_no) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline RiskTable read_risk_table(std::istream& is) {
  RiskTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!header_seen) {
      if (!line.empty() && line[0] == '#') {
        std::string_view c(line);
        c.remove_prefix(1);
        if (!c.empty() && c[0] == ' ') c.remove_prefix(1);
        table.comments.emplace_back(c);
        continue;
      }
      if (line != kRiskHeader) throw ParseError("line " + std::to_string(line_no) + ": expected header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 6) throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields");
    RiskPoint p;
    p.theta_norm = detail::parse_real(f[0], line_no);
    p.estimator_name = std::string(f[1]);
    p.risk_hat = detail::parse_real(f[2], line_no);
    p.std_err = detail::parse_real(f[3], line_no);
    p.n_reps = detail::parse_int<std::int64_t>(f[4], line_no);
    p.seed = detail::parse_int<std::uint64_t>(f[5], line_no);
    table.points.push_back(std::move(p));
  }
  if (!header_seen) throw ParseError("missing header");
  return table;
}

}  // namespace steinrisk::csv
