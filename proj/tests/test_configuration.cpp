#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "riesz/configuration.hpp"

using namespace riesz;

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(Configuration({0.0, 0.5, 1.0}));
  CHECK_THROWS_AS(Configuration({0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Configuration({0.0, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Configuration({0.0, 1.0, 0.5}), std::invalid_argument);
  // degenerate gap at machine scale rejected
  CHECK_THROWS_AS(Configuration({1.0, 1.0 + 1e-17}), std::invalid_argument);
}

TEST_CASE("gaps and midpoints") {
  GapData g = gaps(Configuration({0.0, 0.5, 1.0}));
  CHECK(g.midpoints == std::vector<double>{0.25, 0.75});
  CHECK(g.gaps == std::vector<double>{0.5, 0.5});

  GapData g2 = gaps(Configuration({0.0, 1.0}));
  CHECK(g2.midpoints == std::vector<double>{0.5});
  CHECK(g2.gaps == std::vector<double>{1.0});

  std::mt19937 rng(7);
  std::vector<double> x(10);
  double acc = 0.0;
  for (double& v : x) {
    acc += std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    v = acc;
  }
  GapData g3 = gaps(Configuration(x));
  double total = 0.0;
  for (double l : g3.gaps) total += l;
  CHECK(total == Catch::Approx(x.back() - x.front()).epsilon(1e-14));
}

TEST_CASE("density from configuration") {
  PiecewiseConstantDensity d = density_from_configuration(Configuration({0.0, 0.5, 1.0}));
  CHECK(d.heights == std::vector<double>{1.0, 1.0});
  PiecewiseConstantDensity d2 =
      density_from_configuration(Configuration({0.0, 0.25, 1.0}));
  CHECK(d2.heights[0] == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(d2.heights[1] == Catch::Approx(2.0 / 3.0).epsilon(1e-15));

  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(8);
    double acc = std::uniform_real_distribution<double>(-2.0, 0.0)(rng);
    for (double& v : x) {
      acc += std::uniform_real_distribution<double>(0.05, 1.0)(rng);
      v = acc;
    }
    PiecewiseConstantDensity d3 = density_from_configuration(Configuration(x));
    CHECK(d3.mass() == Catch::Approx(1.0).epsilon(1e-13));
    for (double h : d3.heights) CHECK(h > 0.0);
  }
}

TEST_CASE("density covariance under affine maps") {
  const std::vector<double> x = {0.0, 0.3, 0.4, 1.0};
  const double slope = 2.5, shift = -0.7;
  std::vector<double> y;
  for (double v : x) y.push_back(slope * v + shift);
  PiecewiseConstantDensity dx = density_from_configuration(Configuration(x));
  PiecewiseConstantDensity dy = density_from_configuration(Configuration(y));
  CHECK(dy.mass() == Catch::Approx(1.0).epsilon(1e-13));
  for (std::size_t i = 0; i < dx.heights.size(); ++i)
    CHECK(dy.heights[i] == Catch::Approx(dx.heights[i] / slope).epsilon(1e-13));
}

TEST_CASE("serialisation round trips") {
  const Configuration c({0.0, 0.1234567890123456, 0.5, 1.0});
  const Configuration from_csv = configuration_from_csv_column(to_csv_column(c));
  CHECK(from_csv.positions() == c.positions());
  const Configuration from_json = configuration_from_json(to_json(c));
  CHECK(from_json.positions() == c.positions());
}
