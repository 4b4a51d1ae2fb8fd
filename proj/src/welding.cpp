#include "gmclab/welding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace gmclab {

void validate(const MonotoneMap& m) {
  if (m.x.size() != m.y.size() || m.x.size() < 2)
    throw DegenerateMapError("map needs matching breakpoint/value arrays of length >= 2");
  if (m.x.front() != 0.0 || m.x.back() != 1.0 || m.y.front() != 0.0 || m.y.back() != 1.0)
    throw DegenerateMapError("map must span [0,1] -> [0,1]");
  for (std::size_t i = 1; i < m.x.size(); ++i) {
    if (!(m.x[i] > m.x[i - 1])) throw DegenerateMapError("breakpoints not strictly increasing");
    if (!(m.y[i] > m.y[i - 1])) throw DegenerateMapError("values not strictly increasing");
  }
}

namespace {

// Bump ties up by one ulp; the interior must stay below 1.
void enforce_strict(std::vector<double>& y) {
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] <= y[i - 1]) y[i] = std::nextafter(y[i - 1], std::numeric_limits<double>::infinity());
    if (y[i] >= 1.0) throw DegenerateMapError("cumulative values saturated at 1 before the last cell");
  }
  if (y.back() <= y[y.size() - 2])
    throw DegenerateMapError("cumulative values saturated at 1 before the last cell");
}

}  // namespace

MonotoneMap cdf(const DyadicMeasure& mu) {
  if (!(mu.total > 0.0)) throw DegenerateMapError("cdf of a zero measure");
  const std::size_t n = mu.masses.size();
  MonotoneMap m;
  m.x.resize(n + 1);
  m.y.resize(n + 1);
  const double cell = std::ldexp(1.0, -mu.resolution);
  double cum = 0.0;
  m.x[0] = 0.0;
  m.y[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!(mu.masses[j] > 0.0))
      throw DegenerateMapError("zero cell mass at index " + std::to_string(j) +
                               " (numerical underflow must be surfaced, not hidden)");
    cum += mu.masses[j];
    m.x[j + 1] = static_cast<double>(j + 1) * cell;
    m.y[j + 1] = cum / mu.total;
  }
  m.x[n] = 1.0;
  m.y[n] = 1.0;
  enforce_strict(m.y);
  return m;
}

MonotoneMap invert(const MonotoneMap& m) {
  validate(m);
  return MonotoneMap{m.y, m.x};
}

double evaluate(const MonotoneMap& m, double t) {
  if (t <= m.x.front()) return m.y.front();
  if (t >= m.x.back()) return m.y.back();
  // first breakpoint > t, then interpolate on the segment to its left
  const auto it = std::upper_bound(m.x.begin(), m.x.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - m.x.begin()) - 1;
  if (t == m.x[i]) return m.y[i];
  const double w = (t - m.x[i]) / (m.x[i + 1] - m.x[i]);
  return m.y[i] + w * (m.y[i + 1] - m.y[i]);
}

MonotoneMap compose(const MonotoneMap& outer, const MonotoneMap& inner) {
  MonotoneMap out;
  out.x = inner.x;
  out.y.resize(inner.y.size());
  for (std::size_t i = 0; i < inner.y.size(); ++i) out.y[i] = evaluate(outer, inner.y[i]);
  out.y.front() = 0.0;
  out.y.back() = 1.0;
  enforce_strict(out.y);
  return out;
}

double image_length(const MonotoneMap& m, double a, double b) {
  if (!(a < b)) throw Error("image_length needs a < b");
  return evaluate(m, b) - evaluate(m, a);
}

MonotoneMap identity_map() { return MonotoneMap{{0.0, 1.0}, {0.0, 1.0}}; }

void write_map_csv(const MonotoneMap& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "breakpoint,value\n";
  os.precision(17);
  for (std::size_t i = 0; i < m.x.size(); ++i) os << m.x[i] << ',' << m.y[i] << '\n';
}

MonotoneMap read_map_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  MonotoneMap m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = line.find(',');
    if (c == std::string::npos) throw Error("malformed map CSV line: " + line);
    m.x.push_back(std::stod(line.substr(0, c)));
    m.y.push_back(std::stod(line.substr(c + 1)));
  }
  validate(m);
  return m;
}

}  // namespace gmclab
