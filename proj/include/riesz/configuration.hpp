#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace riesz {

// Strictly ordered particle positions x_0 < ... < x_n, n >= 1.
// Validated once at construction; operations downstream assume validity and
// never re-sort.
class Configuration {
 public:
  explicit Configuration(std::vector<double> positions)
      : x_(std::move(positions)) {
    if (x_.size() < 2)
      throw std::invalid_argument("Configuration: need at least two particles");
    for (std::size_t i = 1; i < x_.size(); ++i) {
      const double gap = x_[i] - x_[i - 1];
      const double scale = std::max(std::fabs(x_[i]), std::fabs(x_[i - 1]));
      if (!(gap > 0.0) || gap <= std::numeric_limits<double>::epsilon() * scale)
        throw std::invalid_argument("Configuration: positions not strictly ordered");
    }
  }

  int n() const { return static_cast<int>(x_.size()) - 1; }
  double operator[](std::size_t i) const { return x_[i]; }
  const std::vector<double>& positions() const { return x_; }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_;
};

struct GapData {
  std::vector<double> midpoints;  // m_i = (x_i + x_{i-1}) / 2
  std::vector<double> gaps;       // l_i = x_i - x_{i-1} > 0
};

inline GapData gaps(const Configuration& c) {
  GapData g;
  const auto& x = c.positions();
  g.midpoints.reserve(x.size() - 1);
  g.gaps.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    g.midpoints.push_back(0.5 * (x[i] + x[i - 1]));
    g.gaps.push_back(x[i] - x[i - 1]);
  }
  return g;
}

// Piecewise constant density: heights[i] on (breakpoints[i], breakpoints[i+1]),
// zero outside.
struct PiecewiseConstantDensity {
  std::vector<double> breakpoints;
  std::vector<double> heights;

  double mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i)
      m += heights[i] * (breakpoints[i + 1] - breakpoints[i]);
    return m;
  }

  std::size_t cells() const { return heights.size(); }
};

// The density phi carried by a configuration: mass 1/n on each gap.
inline PiecewiseConstantDensity density_from_configuration(const Configuration& c) {
  PiecewiseConstantDensity d;
  d.breakpoints = c.positions();
  const double inv_n = 1.0 / static_cast<double>(c.n());
  d.heights.reserve(d.breakpoints.size() - 1);
  for (std::size_t i = 1; i < d.breakpoints.size(); ++i)
    d.heights.push_back(inv_n / (d.breakpoints[i] - d.breakpoints[i - 1]));
  return d;
}

// --- serialisation -----------------------------------------------------------

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// One position per line.
inline std::string to_csv_column(const Configuration& c) {
  std::string out;
  for (double x : c.positions()) {
    out += format_full(x);
    out += "\n";
  }
  return out;
}

inline Configuration configuration_from_csv_column(const std::string& text) {
  std::vector<double> xs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    xs.push_back(std::stod(line));
  }
  return Configuration(std::move(xs));
}

inline nlohmann::json to_json(const Configuration& c) {
  return nlohmann::json(c.positions());
}

inline Configuration configuration_from_json(const nlohmann::json& j) {
  return Configuration(j.get<std::vector<double>>());
}

}  // namespace riesz
