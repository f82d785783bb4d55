#pragma once

// Independent brute-force verifiers used by the tests only. Nothing in
// include/ may depend on this header; agreement between these routines and the
// production closed forms is the point of the exercise.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

namespace oracle {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_depth = 32;
};

namespace detail {

// Gauss-Kronrod 7-15 on [-1, 1].
inline constexpr double kKronrodNodes[15] = {
    -0.9914553711208126, -0.9491079123427585, -0.8648644233597691,
    -0.7415311855993944, -0.5860872354676911, -0.4058451513773972,
    -0.2077849550078985, 0.0,
    0.2077849550078985,  0.4058451513773972,  0.5860872354676911,
    0.7415311855993944,  0.8648644233597691,  0.9491079123427585,
    0.9914553711208126};
inline constexpr double kKronrodWeights[15] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278, 0.2044329400752989,
    0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
    0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
inline constexpr double kGaussWeights[7] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697};

template <typename F>
void gk15(F&& f, double lo, double hi, double& value, double& err) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double kron = 0.0, gauss = 0.0;
  for (int k = 0; k < 15; ++k) {
    const double fx = f(c + h * kKronrodNodes[k]);
    kron += kKronrodWeights[k] * fx;
    if (k % 2 == 1) gauss += kGaussWeights[(k - 1) / 2] * fx;
  }
  value = kron * h;
  err = std::fabs((kron - gauss) * h);
}

template <typename F>
double adapt(F&& f, double lo, double hi, const QuadratureSpec& spec,
             double whole_scale, int depth) {
  double value, err;
  gk15(f, lo, hi, value, err);
  if (err <= spec.abs_tol + spec.rel_tol * std::max(whole_scale, std::fabs(value)) ||
      depth >= spec.max_depth)
    return value;
  const double mid = 0.5 * (lo + hi);
  QuadratureSpec half = spec;
  half.abs_tol = 0.5 * spec.abs_tol;
  return adapt(f, lo, mid, half, whole_scale, depth + 1) +
         adapt(f, mid, hi, half, whole_scale, depth + 1);
}

}  // namespace detail

template <typename F>
double quad1d(F&& f, double lo, double hi, QuadratureSpec spec = {}) {
  if (hi <= lo) return 0.0;
  double value, err;
  detail::gk15(f, lo, hi, value, err);
  return detail::adapt(f, lo, hi, spec, std::fabs(value), 0);
}

namespace detail {

// Closed-form integral of S(u) * u^{-a} over (0, eta], with S(u) =
// f(endpoint +- u) * u^a fitted through samples at the five offsets
// u = eta * {1/16, 1/8, 1/4, 1/2, 1}. The offsets are the exactly
// representable distances achieved after rounding, so the fit sees no position
// jitter; f itself can't resolve distances below eps*|endpoint|, which is why
// the tip is modelled instead of sampled.
//
// When f genuinely blows up like u^{-a}, S is smooth and the quadratic through
// the top three nodes is accurate to O(eta^3). When the singular factor is
// absent or only partial, S inherits a u^a cusp; that case is detected by
// checking the quadratic's prediction at the two lowest nodes, and handled by
// a mixed fit with the extra basis column (u^a - 1)/a (-> log u as a -> 0),
// which reproduces smooth-plus-singular integrands exactly.
inline double singular_tip(const double u[5], const double S[5], double a) {
  const double eta = u[4];
  // quadratic (Newton form) through the top three nodes
  const double d01 = (S[3] - S[2]) / (u[3] - u[2]);
  const double d12 = (S[4] - S[3]) / (u[4] - u[3]);
  const double d012 = (d12 - d01) / (u[4] - u[2]);
  auto quadratic = [&](double t) {
    return S[2] + (t - u[2]) * (d01 + (t - u[3]) * d012);
  };
  double scale = 0.0;
  for (int k = 0; k < 5; ++k) scale = std::max(scale, std::fabs(S[k]));
  const double mismatch = std::max(std::fabs(quadratic(u[0]) - S[0]),
                                   std::fabs(quadratic(u[1]) - S[1]));
  if (mismatch <= 3e-3 * scale) {
    const double s2 = d012;
    const double s1 = d01 - d012 * (u[3] + u[2]);
    const double s0 = S[2] - u[2] * (d01 - d012 * u[3]);
    return s0 * std::pow(eta, 1.0 - a) / (1.0 - a) +
           s1 * std::pow(eta, 2.0 - a) / (2.0 - a) +
           s2 * std::pow(eta, 3.0 - a) / (3.0 - a);
  }
  // mixed model in tau = u/eta on the top four nodes:
  //   S = b0 + b1 tau + b2 tau^2 + b3 (tau^a - 1)/a
  double m[4][5];
  for (int r = 0; r < 4; ++r) {
    const double tau = u[r + 1] / eta;
    m[r][0] = 1.0;
    m[r][1] = tau;
    m[r][2] = tau * tau;
    m[r][3] = (std::pow(tau, a) - 1.0) / a;
    m[r][4] = S[r + 1];
  }
  for (int col = 0; col < 4; ++col) {  // partial-pivot elimination
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    for (int j = col; j < 5; ++j) std::swap(m[col][j], m[piv][j]);
    for (int r = col + 1; r < 4; ++r) {
      const double factor = m[r][col] / m[col][col];
      for (int j = col; j < 5; ++j) m[r][j] -= factor * m[col][j];
    }
  }
  double b[4];
  for (int r = 3; r >= 0; --r) {
    double rhs = m[r][4];
    for (int j = r + 1; j < 4; ++j) rhs -= m[r][j] * b[j];
    b[r] = rhs / m[r][r];
  }
  // int_0^1 basis * tau^{-a} dtau = 1/(1-a), 1/(2-a), 1/(3-a), -1/(1-a)
  return std::pow(eta, 1.0 - a) *
         (b[0] / (1.0 - a) + b[1] / (2.0 - a) + b[2] / (3.0 - a) -
          b[3] / (1.0 - a));
}

}  // namespace detail

// Integral over [c, d] of a function with an integrable singularity at y = c,
// of type (y-c)^{-a} (a in (0,1)) or log(y-c) (a = 0). The innermost tip is
// integrated via the smooth-factor model above; the remainder is flattened by
// the substitution y = c + w^{1/(1-a)} and integrated adaptively.
template <typename F>
double quad1d_left_singular(F&& f, double c, double d, double a,
                            QuadratureSpec spec = {}) {
  if (d <= c) return 0.0;
  const double range = d - c;
  if (a > 0.0) {
    const double eta =
        std::min(range, 6.4e-5 * std::max(range, std::fabs(c)));
    double u[5], S[5];
    bool model_ok = true;
    for (int k = 0; k < 5; ++k) {
      const double y = c + eta * (0.0625 * (1 << k));
      u[k] = y - c;  // exact: the offset actually achieved
      if (!(u[k] > (k == 0 ? 0.0 : u[k - 1]))) model_ok = false;
      if (model_ok) S[k] = f(y) * std::pow(u[k], a);
    }
    double tip = 0.0, w0 = 0.0;
    const double e = 1.0 - a;
    if (model_ok) {
      tip = detail::singular_tip(u, S, a);
      w0 = std::pow(u[4], e);
    }
    auto g = [&](double w) {
      const double y = c + std::pow(w, 1.0 / e);
      if (y <= c) return 0.0;
      return f(y) * std::pow(w, (1.0 - e) / e) / e;
    };
    return tip + quad1d(g, w0, std::pow(range, e), spec);
  }
  // log case: y = c + t^2 tames the endpoint; the sub-resolution tip carries
  // O(eps |c| log) mass and is dropped
  auto g = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double y = c + t * t;
    if (y <= c) return 0.0;
    return 2.0 * t * f(y);
  };
  return quad1d(g, 0.0, std::sqrt(range), spec);
}

// Mirror image: singularity at y = d. Implemented natively (not by flipping
// the argument) so the tip offsets stay exactly representable around d.
template <typename F>
double quad1d_right_singular(F&& f, double c, double d, double a,
                             QuadratureSpec spec = {}) {
  if (d <= c) return 0.0;
  const double range = d - c;
  if (a > 0.0) {
    const double eta =
        std::min(range, 6.4e-5 * std::max(range, std::fabs(d)));
    double u[5], S[5];
    bool model_ok = true;
    for (int k = 0; k < 5; ++k) {
      const double y = d - eta * (0.0625 * (1 << k));
      u[k] = d - y;
      if (!(u[k] > (k == 0 ? 0.0 : u[k - 1]))) model_ok = false;
      if (model_ok) S[k] = f(y) * std::pow(u[k], a);
    }
    double tip = 0.0, w0 = 0.0;
    const double e = 1.0 - a;
    if (model_ok) {
      tip = detail::singular_tip(u, S, a);
      w0 = std::pow(u[4], e);
    }
    auto g = [&](double w) {
      const double y = d - std::pow(w, 1.0 / e);
      if (y >= d) return 0.0;
      return f(y) * std::pow(w, (1.0 - e) / e) / e;
    };
    return tip + quad1d(g, w0, std::pow(range, e), spec);
  }
  auto g = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double y = d - t * t;
    if (y >= d) return 0.0;
    return 2.0 * t * f(y);
  };
  return quad1d(g, 0.0, std::sqrt(range), spec);
}

// Double integral of f(x, y) over [p,q] x [r,s] where f may blow up like
// |x-y|^{-a} (or logarithmically for a = 0) along the diagonal. Iterated
// adaptive quadrature; the inner integral is split at y = x and integrated
// with singularity-flattening substitutions on the adjacent pieces.
template <typename F>
double quad2d_singular(F&& f, double p, double q, double r, double s, double a,
                       QuadratureSpec spec = {}) {
  if (!(p < q) || !(r < s))
    throw std::invalid_argument("quad2d_singular: degenerate rectangle");
  QuadratureSpec inner_spec = spec;
  inner_spec.rel_tol = 0.1 * spec.rel_tol;
  auto inner = [&](double x) {
    auto fy = [&](double y) { return f(x, y); };
    // the diagonal singularity lies at y = x; outside [r, s] the integrand is
    // merely steep and plain adaptive quadrature sees it exactly
    if (x <= r || x >= s) return quad1d(fy, r, s, inner_spec);
    return quad1d_right_singular(fy, r, x, a, inner_spec) +
           quad1d_left_singular(fy, x, s, a, inner_spec);
  };
  return quad1d(inner, p, q, spec);
}

// Central finite differences with two Richardson extrapolation levels.
template <typename F>
double finite_diff(F&& f, double x, int order, double h) {
  auto base = [&](double step) {
    if (order == 1) return (f(x + step) - f(x - step)) / (2.0 * step);
    if (order == 2) return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
    throw std::invalid_argument("finite_diff: order must be 1 or 2");
  };
  auto richardson1 = [&](double step) {
    return (4.0 * base(0.5 * step) - base(step)) / 3.0;
  };
  const double d = (16.0 * richardson1(0.5 * h) - richardson1(h)) / 15.0;
  if (!std::isfinite(d))
    throw std::domain_error("finite_diff: infinite sample in stencil");
  return d;
}

}  // namespace oracle
