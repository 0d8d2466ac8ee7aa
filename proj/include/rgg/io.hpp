#pragma once

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rgg/errors.hpp"
#include "rgg/geometry.hpp"

namespace rgg {

/// One point per line, whitespace-separated coordinates; blank lines and
/// lines starting with '#' are skipped. The first point fixes the dimension.
inline PointSet read_points(std::istream& in) {
  PointSet out;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> z;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    z.clear();
    for (double c; ls >> c;) z.push_back(c);
    require(ls.eof(), "read_points: bad number on line " + std::to_string(lineno));
    if (out.dim() == 0) {
      require(!z.empty(), "read_points: empty point on line " + std::to_string(lineno));
      out = PointSet(z.size());
    }
    require(z.size() == out.dim(), "read_points: dimension mismatch on line " + std::to_string(lineno));
    out.push_back(z);
  }
  if (out.empty()) throw EmptyInput("read_points: no points");
  return out;
}

inline void write_points(std::ostream& os, const PointSet& pts) {
  os << std::setprecision(17);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto z = pts[i];
    for (std::size_t j = 0; j < z.size(); ++j) os << (j ? " " : "") << z[j];
    os << '\n';
  }
}

/// One vertex id per line.
inline std::vector<VertexId> read_cycle(std::istream& in) {
  std::vector<VertexId> c;
  std::string tok;
  while (in >> tok) {
    const bool digits = std::all_of(tok.begin(), tok.end(), [](unsigned char ch) { return std::isdigit(ch); });
    require(digits && tok.size() <= 10, "read_cycle: bad vertex id '" + tok + "'");
    const auto v = std::stoull(tok);
    require(v <= std::numeric_limits<VertexId>::max(), "read_cycle: vertex id out of range '" + tok + "'");
    c.push_back(static_cast<VertexId>(v));
  }
  return c;
}

inline void write_cycle(std::ostream& os, std::span<const VertexId> cycle) {
  for (VertexId v : cycle) os << v << '\n';
}

}  // namespace rgg
