#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "dmm/cli/cli.hpp"
#include "dmm/error.hpp"

namespace dmm::cli {

void write_samples(std::ostream& out, const std::vector<double>& samples) {
  char buf[32];
  for (double x : samples) {
    // %.17g round-trips; normalize -0 so a point mass at 0 prints "0".
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    out.write(buf, len);
    out.put('\n');
  }
}

std::vector<std::vector<double>> read_sample_rows(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
      if (p == end) break;
      if (*p == '+') ++p;
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(lineno) + ": not a finite decimal number", lineno,
                         static_cast<std::size_t>(p - line.data()) + 1);
      }
      row.push_back(v);
      p = next;
    }
    if (row.empty()) continue;
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(width) +
                           " columns, found " + std::to_string(row.size()),
                       lineno, 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dmm::cli
