#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "riesz/configuration.hpp"
#include "riesz/potentials.hpp"
#include "riesz/summation.hpp"

namespace riesz {

namespace detail {

// Second antiderivative F of V_a (F'' = V_a), in extended precision: the
// 1/((1-a)(2-a)) prefactor blows up as a -> 1 and the corner formula below
// cancels heavily for distant rectangles.
inline long double second_antiderivative_Va(double a, long double t) {
  const long double r = fabsl(t);
  if (r == 0.0L) return 0.0L;
  if (a == 0.0) return r * r * (3.0L - 2.0L * logl(r)) * 0.25L;
  const long double one_m_a = 1.0L - static_cast<long double>(a);
  long double rp;  // r^{2-a}; sqrt-based fast paths for the swept exponents
  if (a == 0.5)
    rp = r * sqrtl(r);
  else if (a == 0.25)
    rp = r * sqrtl(r) * sqrtl(sqrtl(r));
  else if (a == 0.75)
    rp = r * sqrtl(sqrtl(r));
  else
    rp = powl(r, 2.0L - static_cast<long double>(a));
  return rp / (one_m_a * (2.0L - a));
}

}  // namespace detail

// Exact double integral of V_a(x - y) over [p,q] x [r,s] via the corner
// formula F(q-r) - F(q-s) - F(p-r) + F(p-s). Branch-free over all overlap
// geometries; finite for a < 1 even when the rectangles coincide.
inline double rect_integral_Va(RieszExponent a, double p, double q, double r,
                               double s) {
  if (!(p < q) || !(r < s))
    throw std::invalid_argument("rect_integral_Va: degenerate interval");
  const long double f1 = detail::second_antiderivative_Va(a.a, static_cast<long double>(q) - r);
  const long double f2 = detail::second_antiderivative_Va(a.a, static_cast<long double>(q) - s);
  const long double f3 = detail::second_antiderivative_Va(a.a, static_cast<long double>(p) - r);
  const long double f4 = detail::second_antiderivative_Va(a.a, static_cast<long double>(p) - s);
  return static_cast<double>((f1 - f2) - (f3 - f4));
}

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
inline const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

template <typename F>
double gauss_panel(F&& f, double lo, double hi, const GaussRule& rule) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    s += rule.weights[k] * f(c + h * rule.nodes[k]);
  return s * h;
}

// Integrate kernel(u) * w(u) over [lo, hi] where w is affine and the kernel may
// lose smoothness at u = 0. Panels are graded geometrically towards 0.
template <typename F, typename W>
double integrate_difference_piece(F&& kernel, W&& w, double lo, double hi,
                                  const GaussRule& rule) {
  if (hi <= lo) return 0.0;
  auto f = [&](double u) { return kernel(u) * w(u); };
  if (lo > 0.0 || hi < 0.0) {
    // away from the kink: a few equal panels suffice
    double sum = 0.0;
    const int panels = 4;
    for (int k = 0; k < panels; ++k)
      sum += gauss_panel(f, lo + (hi - lo) * k / panels,
                         lo + (hi - lo) * (k + 1) / panels, rule);
    return sum;
  }
  if (lo < 0.0 && hi > 0.0)
    return integrate_difference_piece(kernel, w, lo, 0.0, rule) +
           integrate_difference_piece(kernel, w, 0.0, hi, rule);
  // one endpoint is exactly 0: dyadic grading towards it
  const bool zero_at_lo = (lo == 0.0);
  const double len = hi - lo;
  double sum = 0.0;
  double frac = 1.0;
  const int levels = 40;
  for (int k = 0; k < levels; ++k) {
    const double next = frac * 0.5;
    double a_u, b_u;
    if (zero_at_lo) {
      a_u = (k + 1 == levels) ? 0.0 : len * next;
      b_u = len * frac;
    } else {
      a_u = hi - len * frac;
      b_u = (k + 1 == levels) ? hi : hi - len * next;
    }
    sum += gauss_panel(f, a_u, b_u, rule);
    frac = next;
  }
  return sum;
}

}  // namespace detail

// Double integral of kernel(x - y) over [p,q] x [r,s] for a finite (but
// possibly non-smooth-at-0) even kernel. Reduces to a 1D integral of
// kernel(u) times the overlap length of [p,q] and [r+u, s+u], which is
// piecewise affine; each affine piece is integrated with Gauss-Legendre of
// the requested order.
template <typename Kernel>
double rect_integral_difference_kernel(Kernel&& kernel, double p, double q,
                                       double r, double s, int order) {
  if (!(p < q) || !(r < s))
    throw std::invalid_argument("rect_integral: degenerate interval");
  if (order < 2) throw std::invalid_argument("rect_integral: order must be >= 2");

  const detail::GaussRule& rule = detail::gauss_legendre(order);
  // overlap(u) = |[p,q] cap [r+u, s+u]|, supported on [p-s, q-r], affine
  // between the sorted break values.
  double breaks[4] = {p - s, p - r, q - s, q - r};
  std::sort(std::begin(breaks), std::end(breaks));
  auto overlap = [&](double u) {
    const double lo = std::max(p, r + u);
    const double hi = std::min(q, s + u);
    return std::max(0.0, hi - lo);
  };
  double total = 0.0;
  for (int piece = 0; piece < 3; ++piece)
    total += detail::integrate_difference_piece(kernel, overlap, breaks[piece],
                                                breaks[piece + 1], rule);
  return total;
}

inline double rect_integral_Vreg(const SmoothKernel& kernel, double p, double q,
                                 double r, double s, int order) {
  return rect_integral_difference_kernel(
      [&kernel](double u) { return kernel.value(u); }, p, q, r, s, order);
}

inline double rect_integral_V(const InteractionPotential& V, double p, double q,
                              double r, double s, int reg_order = 24) {
  double value = rect_integral_Va(V.exponent(), p, q, r, s);
  if (V.has_regular_part())
    value += rect_integral_Vreg(*V.regular_part(), p, q, r, s, reg_order);
  return value;
}

// E(phi) for a piecewise constant probability density: the interaction part
// cell pair by cell pair (V_a closed form + V_reg quadrature), the confinement
// part by exact polynomial integration.
inline double continuum_energy_of_density(const PiecewiseConstantDensity& d,
                                          const InteractionPotential& V,
                                          const ConfiningPotential& U,
                                          int reg_order = 24) {
  if (std::fabs(d.mass() - 1.0) > 1e-9)
    throw std::invalid_argument("continuum_energy_of_density: density must have unit mass");

  const std::size_t m = d.cells();
  for (std::size_t i = 0; i < m; ++i)
    if (d.heights[i] > 0.0 &&
        (!U.contains(d.breakpoints[i]) || !U.contains(d.breakpoints[i + 1])))
      return kInf;

  long double sum = 0.0L, comp = 0.0L;
  auto add = [&sum, &comp](long double x) {
    const long double y = x - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };

  for (std::size_t i = 0; i < m; ++i) {
    const double pi_ = d.breakpoints[i], qi = d.breakpoints[i + 1];
    const double hi_ = d.heights[i];
    if (hi_ == 0.0) continue;
    add(0.5L * hi_ * hi_ * rect_integral_V(V, pi_, qi, pi_, qi, reg_order));
    for (std::size_t j = i + 1; j < m; ++j) {
      const double hj = d.heights[j];
      if (hj == 0.0) continue;
      add(static_cast<long double>(hi_) * hj *
          rect_integral_V(V, pi_, qi, d.breakpoints[j], d.breakpoints[j + 1],
                          reg_order));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (d.heights[i] == 0.0) continue;
    add(static_cast<long double>(d.heights[i]) *
        U.integral(d.breakpoints[i], d.breakpoints[i + 1]));
  }
  return static_cast<double>(sum);
}

}  // namespace riesz
