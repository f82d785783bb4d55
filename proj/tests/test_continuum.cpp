#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "riesz/continuum.hpp"
#include "riesz/exact_energy.hpp"

using namespace riesz;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("equilibrium density values") {
  const EquilibriumCase box0 = make_equilibrium_case(CaseId::BoundedBox, 0.0);
  CHECK(equilibrium_density(box0, 0.5) == Catch::Approx(2.0 / kPi).epsilon(1e-13));
  const EquilibriumCase q0 =
      make_equilibrium_case(CaseId::QuadraticConfinement, 0.0);
  CHECK(equilibrium_density(q0, 0.5) == Catch::Approx(4.0 / kPi).epsilon(1e-13));
  CHECK(equilibrium_density(q0, -0.2) == 0.0);
  CHECK(equilibrium_density(q0, 1.2) == 0.0);
}

TEST_CASE("equilibrium density integrates to one") {
  for (CaseId id : {CaseId::BoundedBox, CaseId::QuadraticConfinement}) {
    for (double a : {0.0, 0.25, 0.5, 0.75}) {
      const EquilibriumCase c = make_equilibrium_case(id, a);
      // substitute around both endpoints where the box density blows up
      auto f = [&c](double x) { return equilibrium_density(c, x); };
      const double mass =
          oracle::quad1d_left_singular(f, 0.0, 0.5, 1.0 - c.alpha) +
          oracle::quad1d_right_singular(f, 0.5, 1.0, 1.0 - c.alpha);
      CHECK(mass == Catch::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("continuum minimum energies") {
  CHECK(continuum_minimum_energy(make_equilibrium_case(CaseId::BoundedBox, 0.0)) ==
        Catch::Approx(std::log(2.0)).epsilon(1e-15));
  // The log-gas quadratic case sits 3/8 above log 2; the kernel-offset limit of
  // the a > 0 family and direct quadrature agree on this value.
  CHECK(continuum_minimum_energy(
            make_equilibrium_case(CaseId::QuadraticConfinement, 0.0)) ==
        Catch::Approx(std::log(2.0) + 0.375).epsilon(1e-15));
  CHECK(continuum_minimum_energy(make_equilibrium_case(CaseId::BoundedBox, 0.5)) ==
        Catch::Approx(1.3110288).epsilon(1e-6));
}

TEST_CASE("confinement strength gamma") {
  CHECK(gamma_a(0.0) == 4.0);
  CHECK(gamma_a(0.5) == Catch::Approx(6.5551).epsilon(2e-4));
  // gamma_a / a -> 4 as a -> 0+
  CHECK(gamma_a(1e-8) / 1e-8 == Catch::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("quantile function") {
  const EquilibriumCase box0 = make_equilibrium_case(CaseId::BoundedBox, 0.0);
  CHECK(quantile(box0, 0.5) == 0.5);
  // arcsine law: F^{-1}(u) = sin^2(pi u / 2)
  const double s = std::sin(kPi / 8.0);
  CHECK(quantile(box0, 0.25) == Catch::Approx(s * s).epsilon(1e-12));
  CHECK(quantile(box0, 0.0) == 0.0);
  CHECK(quantile(box0, 1.0) == 1.0);

  for (CaseId id : {CaseId::BoundedBox, CaseId::QuadraticConfinement}) {
    for (double a : {0.0, 0.25, 0.75}) {
      const EquilibriumCase c = make_equilibrium_case(id, a);
      double prev = 0.0;
      for (int k = 1; k < 40; ++k) {
        const double u = k / 40.0;
        const double x = quantile(c, u);
        CHECK(x > prev);
        prev = x;
        CHECK(equilibrium_cdf(c, x) == Catch::Approx(u).margin(1e-12));
        // symmetry of the Beta(alpha, alpha) law
        CHECK(quantile(c, 1.0 - u) == Catch::Approx(1.0 - x).margin(1e-12));
      }
    }
  }
}

TEST_CASE("quantile configurations") {
  const EquilibriumCase box0 = make_equilibrium_case(CaseId::BoundedBox, 0.0);
  const Configuration c2 = quantile_configuration(box0, 2);
  CHECK(c2[0] == 0.0);
  CHECK(c2[1] == 0.5);
  CHECK(c2[2] == 1.0);
  const Configuration c4 = quantile_configuration(box0, 4);
  const double s = std::sin(kPi / 8.0);
  CHECK(c4[1] == Catch::Approx(s * s).epsilon(1e-12));
  CHECK(c4[3] == Catch::Approx(1.0 - s * s).epsilon(1e-12));

  // equal cell masses of 1/n
  const EquilibriumCase q =
      make_equilibrium_case(CaseId::QuadraticConfinement, 0.5);
  const Configuration c8 = quantile_configuration(q, 8);
  for (int i = 1; i <= 8; ++i)
    CHECK(equilibrium_cdf(q, c8[i]) - equilibrium_cdf(q, c8[i - 1]) ==
          Catch::Approx(0.125).margin(1e-12));
}

TEST_CASE("boundary gap scaling of the quantile grid") {
  // near x = 0 the CDF behaves like c x^alpha, so x_1 n^{1/alpha} stabilises
  for (CaseId id : {CaseId::BoundedBox, CaseId::QuadraticConfinement}) {
    for (double a : {0.0, 0.5}) {
      const EquilibriumCase c = make_equilibrium_case(id, a);
      const double limit =
          std::pow(c.alpha / c.norm_constant, 1.0 / c.alpha);
      double prev_err = 1e300;
      for (int n : {16, 64, 256}) {
        const double scaled =
            quantile(c, 1.0 / n) * std::pow(static_cast<double>(n), 1.0 / c.alpha);
        const double err = std::fabs(scaled - limit);
        CHECK(err < 0.2 * limit);
        CHECK(err < prev_err + 1e-12);
        prev_err = err;
      }
    }
  }
}

TEST_CASE("discretised equilibrium converges in energy") {
  for (CaseId id : {CaseId::BoundedBox, CaseId::QuadraticConfinement}) {
    for (double a : {0.0, 0.5}) {
      const EquilibriumCase c = make_equilibrium_case(id, a);
      const InteractionPotential v = case_interaction(c);
      const ConfiningPotential u = case_confinement(c);
      const double target = continuum_minimum_energy(c);
      double prev_gap = 1e300;
      for (int N : {8, 32, 128}) {
        const double e =
            continuum_energy_of_density(discretize_equilibrium(c, N), v, u);
        const double gap = std::fabs(e - target);
        CHECK(gap < prev_gap);
        prev_gap = gap;
      }
      CHECK(prev_gap < 2e-3);
    }
  }
}

TEST_CASE("single-cell discretisation is the uniform density") {
  const EquilibriumCase c = make_equilibrium_case(CaseId::BoundedBox, 0.5);
  const PiecewiseConstantDensity d = discretize_equilibrium(c, 1);
  REQUIRE(d.heights.size() == 1);
  CHECK(d.breakpoints.front() == 0.0);
  CHECK(d.breakpoints.back() == 1.0);
  CHECK(d.heights[0] == Catch::Approx(1.0).epsilon(1e-15));
}
