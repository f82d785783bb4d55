#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "riesz/configuration.hpp"
#include "riesz/potentials.hpp"
#include "riesz/special_functions.hpp"

namespace riesz {

enum class CaseId {
  BoundedBox,            // D(U) = [0,1], U = 0
  QuadraticConfinement,  // D(U) = R, U = gamma_a (x - 1/2)^2
};

inline const char* case_name(CaseId id) {
  return id == CaseId::BoundedBox ? "box" : "quadratic";
}

// gamma_a makes supp(rho) = [0,1] under quadratic confinement.
inline double gamma_a(double a) {
  if (a == 0.0) return 4.0;
  const double pi = 3.14159265358979323846;
  const double g_half = gamma_fn(0.5 * (1.0 + a));
  // a^2 (2+a) Gamma(a) written via Gamma(1+a) = a Gamma(a)
  return 2.0 * pi * a * (2.0 + a) * gamma_fn(1.0 + a) /
         (g_half * g_half * std::cos(0.5 * a * pi));
}

// Analytic equilibrium measure for the two closed-form confinement choices.
// Both densities are symmetric Beta shapes on [0,1]:
//   BoundedBox:           rho(x) = c [x(1-x)]^{-(1-a)/2}   (Beta((1+a)/2, (1+a)/2))
//   QuadraticConfinement: rho(x) = c [x(1-x)]^{+(1+a)/2}   (Beta((3+a)/2, (3+a)/2))
struct EquilibriumCase {
  CaseId case_id;
  double a;
  double beta_exponent;    // exponent of [x(1-x)]
  double norm_constant;    // density prefactor
  double continuum_energy; // E(rho)
  double gamma;            // confinement strength (QuadraticConfinement only)
  double alpha;            // Beta(alpha, alpha) shape = beta_exponent + 1
};

inline EquilibriumCase make_equilibrium_case(CaseId id, double a) {
  RieszExponent check(a);  // range validation
  (void)check;
  const double pi = 3.14159265358979323846;
  EquilibriumCase c;
  c.case_id = id;
  c.a = a;
  const double g_half = gamma_fn(0.5 * (1.0 + a));
  if (id == CaseId::BoundedBox) {
    c.beta_exponent = -0.5 * (1.0 - a);
    c.norm_constant = gamma_fn(1.0 + a) / (g_half * g_half);
    c.continuum_energy =
        (a == 0.0) ? std::log(2.0)
                   : pi * gamma_fn(1.0 + a) /
                         (2.0 * g_half * g_half * std::cos(0.5 * a * pi));
    c.gamma = 0.0;
  } else {
    c.beta_exponent = 0.5 * (1.0 + a);
    c.norm_constant =
        4.0 * (2.0 + a) * gamma_fn(1.0 + a) / ((1.0 + a) * g_half * g_half);
    // a = 0: log 2 + 3/8. The 3/8 is the a->0+ limit of the a > 0 closed form
    // after removing the O(1) kernel offset (|x|^{-a} = 1 - a log|x| + O(a^2)),
    // and matches direct quadrature of E at the semicircle to 14 digits.
    c.continuum_energy =
        (a == 0.0) ? std::log(2.0) + 0.375
                   : pi * (2.0 + a) * (2.0 + a) * gamma_fn(1.0 + a) /
                         (2.0 * (4.0 + a) * g_half * g_half *
                          std::cos(0.5 * a * pi));
    c.gamma = gamma_a(a);
  }
  c.alpha = c.beta_exponent + 1.0;
  return c;
}

inline InteractionPotential case_interaction(const EquilibriumCase& c) {
  return pure_riesz(c.a);
}

inline ConfiningPotential case_confinement(const EquilibriumCase& c) {
  if (c.case_id == CaseId::BoundedBox)
    return ConfiningPotential({0.0}, 0.0, 1.0);
  // gamma (x - 1/2)^2 = gamma/4 - gamma x + gamma x^2
  return ConfiningPotential({0.25 * c.gamma, -c.gamma, c.gamma}, -kInf, kInf);
}

inline double equilibrium_density(const EquilibriumCase& c, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  return c.norm_constant * std::pow(x * (1.0 - x), c.beta_exponent);
}

inline double continuum_minimum_energy(const EquilibriumCase& c) {
  return c.continuum_energy;
}

inline double equilibrium_cdf(const EquilibriumCase& c, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return ibeta_reg(c.alpha, c.alpha, x);
}

// Inverse CDF by bracketed Newton with bisection fallback; |CDF(x) - u| <= 1e-13.
inline double quantile(const EquilibriumCase& c, double u) {
  if (u < 0.0 || u > 1.0) throw std::domain_error("quantile: u outside [0,1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  if (u == 0.5) return 0.5;
  if (u > 0.5) return 1.0 - quantile(c, 1.0 - u);

  double lo = 0.0, hi = 0.5;
  double x = std::min(0.5, std::max(1e-12, u));
  for (int iter = 0; iter < 200; ++iter) {
    const double f = equilibrium_cdf(c, x) - u;
    if (std::fabs(f) <= 1e-13) return x;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    const double d = equilibrium_density(c, x);
    double next;
    if (std::isfinite(d) && d > 1e-300 && d < 1e12) {
      next = x - f / d;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (next == x) break;
    x = next;
    if (hi - lo < 1e-16) break;
  }
  return x;
}

// Quantile configuration: cell masses of rho are exactly 1/n, endpoints pinned.
inline Configuration quantile_configuration(const EquilibriumCase& c, int n) {
  if (n < 1) throw std::invalid_argument("quantile_configuration: n >= 1 required");
  std::vector<double> x(n + 1);
  x[0] = 0.0;
  x[n] = 1.0;
  for (int i = 1; i < n; ++i)
    x[i] = quantile(c, static_cast<double>(i) / static_cast<double>(n));
  return Configuration(std::move(x));
}

// Piecewise-constant proxy of rho on its own quantile grid (equal cell masses).
inline PiecewiseConstantDensity discretize_equilibrium(const EquilibriumCase& c,
                                                       int N) {
  const Configuration grid = quantile_configuration(c, N);
  return density_from_configuration(grid);
}

}  // namespace riesz
