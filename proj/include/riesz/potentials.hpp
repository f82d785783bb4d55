#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riesz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Singularity exponent of the interaction kernel, a in [0, 1).
// a = 0 selects the logarithmic kernel.
struct RieszExponent {
  double a;

  explicit RieszExponent(double value) : a(value) {
    if (!(value >= 0.0 && value < 1.0))
      throw std::invalid_argument("RieszExponent: a must lie in [0, 1)");
  }
};

// Singular part: -log|x| for a = 0, |x|^{-a} for a in (0, 1). Returns +inf at x = 0.
namespace detail {

// r^{-a} with sqrt-based fast paths for the quarter exponents the experiments
// sweep over; pow() dominates the O(n^2) energy loops otherwise.
inline double pow_neg(double r, double a) {
  if (a == 0.5) return 1.0 / std::sqrt(r);
  if (a == 0.25) return 1.0 / std::sqrt(std::sqrt(r));
  if (a == 0.75) {
    const double q = std::sqrt(std::sqrt(r));
    return 1.0 / (q * q * q);
  }
  return std::pow(r, -a);
}

}  // namespace detail

inline double eval_Va(RieszExponent a, double x) {
  const double r = std::fabs(x);
  if (a.a == 0.0) return r == 0.0 ? kInf : -std::log(r);
  if (r == 0.0) return kInf;
  return detail::pow_neg(r, a.a);
}

inline double eval_Va_deriv(RieszExponent a, double x, int order) {
  if (x == 0.0) throw std::domain_error("eval_Va_deriv: derivative at x = 0");
  if (order == 1) {
    if (a.a == 0.0) return -1.0 / x;
    const double s = x > 0.0 ? 1.0 : -1.0;
    const double r = std::fabs(x);
    return -a.a * s * detail::pow_neg(r, a.a) / r;
  }
  if (order == 2) {
    if (a.a == 0.0) return 1.0 / (x * x);
    const double r = std::fabs(x);
    return a.a * (a.a + 1.0) * detail::pow_neg(r, a.a) / (r * r);
  }
  throw std::invalid_argument("eval_Va_deriv: order must be 1 or 2");
}

// Even C^2 perturbation of the singular kernel, supplied as value and two
// derivatives. Evenness is assumed and spot-checked at construction.
struct SmoothKernel {
  std::function<double(double)> value;
  std::function<double(double)> deriv1;
  std::function<double(double)> deriv2;
  std::string name = "custom";
};

class InteractionPotential {
 public:
  explicit InteractionPotential(RieszExponent a,
                                std::optional<SmoothKernel> reg = std::nullopt)
      : a_(a), reg_(std::move(reg)) {
    if (reg_) {
      for (double x : {0.17, 0.9, 2.3, 7.1}) {
        const double d = reg_->value(x) - reg_->value(-x);
        if (std::fabs(d) > 1e-12 * (1.0 + std::fabs(reg_->value(x))))
          throw std::invalid_argument("InteractionPotential: regular part is not even");
      }
    }
  }

  RieszExponent exponent() const { return a_; }
  double a() const { return a_.a; }
  bool has_regular_part() const { return reg_.has_value(); }
  const std::optional<SmoothKernel>& regular_part() const { return reg_; }

  // V, V' or V'' at x. Order >= 1 requires x != 0.
  double eval(double x, int order = 0) const {
    if (order == 0) {
      double v = eval_Va(a_, x);
      if (reg_) v += reg_->value(x);
      return v;
    }
    double v = eval_Va_deriv(a_, x, order);
    if (reg_) v += (order == 1 ? reg_->deriv1(x) : reg_->deriv2(x));
    return v;
  }

 private:
  RieszExponent a_;
  std::optional<SmoothKernel> reg_;
};

inline double eval_V(const InteractionPotential& p, double x, int order = 0) {
  return p.eval(x, order);
}

// V capped by its tangent line at 1/n. Removes the singularity at scale 1/n;
// finite everywhere, non-increasing on [0, inf), V - V_n supported in [-1/n, 1/n].
class RenormalizedPotential {
 public:
  RenormalizedPotential(InteractionPotential base, int n)
      : base_(std::move(base)), n_(n) {
    if (n < 1) throw std::invalid_argument("RenormalizedPotential: n must be >= 1");
    const double h = 1.0 / static_cast<double>(n);
    v_at_h_ = base_.eval(h);
    dv_at_h_ = base_.eval(h, 1);
  }

  int n() const { return n_; }
  const InteractionPotential& base() const { return base_; }

  double eval(double x) const {
    const double r = std::fabs(x);
    const double h = 1.0 / static_cast<double>(n_);
    if (r <= h) return v_at_h_ + (r - h) * dv_at_h_;
    return base_.eval(r);
  }

 private:
  InteractionPotential base_;
  int n_;
  double v_at_h_;
  double dv_at_h_;
};

inline double eval_Vn(const RenormalizedPotential& v, double x) { return v.eval(x); }

// Convex polynomial confinement on [z1, z2], +inf outside. z1/z2 may be +-inf.
class ConfiningPotential {
 public:
  ConfiningPotential(std::vector<double> coefficients, double z1, double z2)
      : coeffs_(std::move(coefficients)), z1_(z1), z2_(z2) {
    if (!(z1 < z2)) throw std::invalid_argument("ConfiningPotential: need z1 < z2");
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    validate_shape();
  }

  double lower() const { return z1_; }
  double upper() const { return z2_; }
  bool contains(double x) const { return x >= z1_ && x <= z2_; }

  double eval(double x) const {
    if (!contains(x)) return kInf;
    return horner(coeffs_, x);
  }

  double deriv(double x, int order) const {
    if (!contains(x)) throw std::domain_error("ConfiningPotential: derivative outside domain");
    std::vector<double> c = coeffs_;
    for (int k = 0; k < order; ++k) c = differentiate(c);
    return horner(c, x);
  }

  // Exact integral over [lo, hi] (both inside the domain).
  double integral(double lo, double hi) const {
    std::vector<double> anti(coeffs_.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
      anti[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return horner(anti, hi) - horner(anti, lo);
  }

  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  static double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
  }

  static std::vector<double> differentiate(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
  }

  void validate_shape() const {
    const double lo = std::max(z1_, -10.0);
    const double hi = std::min(z2_, 10.0);
    const int m = 257;
    const std::vector<double> c2 = differentiate(differentiate(coeffs_));
    double min_val = kInf;
    double max_curv = 0.0;
    for (int i = 0; i < m; ++i) {
      const double x = lo + (hi - lo) * i / (m - 1);
      const double u = horner(coeffs_, x);
      min_val = std::min(min_val, u);
      if (u < -1e-10) throw std::invalid_argument("ConfiningPotential: U < 0 on domain");
      const double curv = horner(c2, x);
      if (curv < -1e-10)
        throw std::invalid_argument("ConfiningPotential: U not convex on domain");
      max_curv = std::max(max_curv, curv);
    }
    // the true minimum can fall between grid points; budget for the curvature
    const double step = (hi - lo) / (m - 1);
    if (min_val > 1e-8 + 0.5 * max_curv * step * step)
      throw std::invalid_argument("ConfiningPotential: min U != 0 on domain");
  }

  std::vector<double> coeffs_;
  double z1_;
  double z2_;
};

inline double eval_U(const ConfiningPotential& u, double x) { return u.eval(x); }

// ---------------------------------------------------------------------------
// Built-in regular parts (a = 0 kernels from plasticity and sampling theory).
// Series thresholds keep the small-x cancellation below ~1e-13.

namespace detail {

inline double plasticity_reg_value(double x) {
  const double r = std::fabs(x);
  if (r < 0.05) {
    const double r2 = r * r;
    return 1.0 - 0.69314718055994530942 /* log 2 */
           + r2 * (1.0 / 6.0 + r2 * (-1.0 / 60.0 + r2 / 567.0));
  }
  // x coth x - log(2 sinh x) + log x, rearranged overflow-free
  return 2.0 * r / std::expm1(2.0 * r) - std::log1p(-std::exp(-2.0 * r)) + std::log(r);
}

inline double plasticity_reg_d1(double x) {
  const double r = std::fabs(x);
  const double s = x >= 0.0 ? 1.0 : -1.0;
  if (r < 0.05) {
    const double r2 = r * r;
    return s * r * (1.0 / 3.0 + r2 * (-1.0 / 15.0 + r2 * 2.0 / 189.0));
  }
  const double sh = std::sinh(r);
  return s * (1.0 / r - r / (sh * sh));
}

inline double plasticity_reg_d2(double x) {
  const double r = std::fabs(x);
  if (r < 0.05) {
    const double r2 = r * r;
    return 1.0 / 3.0 + r2 * (-1.0 / 5.0 + r2 * 10.0 / 189.0);
  }
  const double sh = std::sinh(r);
  const double csch2 = 1.0 / (sh * sh);
  return csch2 * (2.0 * r / std::tanh(r) - 1.0) - 1.0 / (r * r);
}

inline double tanhlog_reg_value(double x) {
  const double r = std::fabs(x);
  if (r < 0.05) {
    const double r2 = r * r;
    return r2 * (1.0 / 3.0 + r2 * (-7.0 / 90.0 + r2 * 62.0 / 2835.0));
  }
  return std::log(r) - std::log(std::tanh(r));
}

inline double tanhlog_reg_d1(double x) {
  const double r = std::fabs(x);
  const double s = x >= 0.0 ? 1.0 : -1.0;
  if (r < 0.05) {
    const double r2 = r * r;
    return s * r * (2.0 / 3.0 + r2 * (-14.0 / 45.0 + r2 * 124.0 / 945.0));
  }
  return s * (1.0 / r - 2.0 / std::sinh(2.0 * r));
}

inline double tanhlog_reg_d2(double x) {
  const double r = std::fabs(x);
  if (r < 0.05) {
    const double r2 = r * r;
    return 2.0 / 3.0 + r2 * (-14.0 / 15.0 + r2 * 124.0 / 189.0);
  }
  const double e2 = std::exp(-2.0 * r);
  const double e4 = e2 * e2;
  const double denom = 1.0 - e4;
  return -1.0 / (r * r) + 8.0 * e2 * (1.0 + e4) / (denom * denom);
}

}  // namespace detail

// V(x) = x coth x - log(2 |sinh x|): dislocation-interaction kernel, a = 0.
inline SmoothKernel plasticity_kernel() {
  return SmoothKernel{detail::plasticity_reg_value, detail::plasticity_reg_d1,
                      detail::plasticity_reg_d2, "plasticity"};
}

// V(x) = -log|tanh x|: optimal-sampling kernel, a = 0.
inline SmoothKernel tanhlog_kernel() {
  return SmoothKernel{detail::tanhlog_reg_value, detail::tanhlog_reg_d1,
                      detail::tanhlog_reg_d2, "tanhlog"};
}

inline InteractionPotential pure_riesz(double a) {
  return InteractionPotential(RieszExponent(a));
}

// ---------------------------------------------------------------------------
// Tail truncation: keep V on (0, R], blend V' to zero over [R, R+1] with a C^2
// polynomial step, integrate. The result is even, convex on (0, inf) and
// constant beyond R+1, so minimisers are insensitive to it (tail invariance).

namespace detail {

inline double smootherstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double smootherstep_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u);
}

// 20-point Gauss-Legendre on [lo, hi].
template <typename F>
double gl20(F&& f, double lo, double hi) {
  static const double nodes[10] = {
      0.0765265211334973, 0.2277858511416451, 0.3737060887154196,
      0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
      0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
      0.9931285991850949};
  static const double weights[10] = {
      0.1527533871307258, 0.1491729864726037, 0.1420961093183821,
      0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
      0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
      0.0176140071391521};
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  for (int k = 0; k < 10; ++k)
    s += weights[k] * (f(c + h * nodes[k]) + f(c - h * nodes[k]));
  return s * h;
}

}  // namespace detail

inline InteractionPotential truncate_tails(const InteractionPotential& p, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("truncate_tails: R must be positive");

  // T = (tilde V) - V: zero on [-R, R], smooth everywhere.
  auto tail_slope_excess = [p, R](double y) {
    return -detail::smootherstep(y - R) * p.eval(y, 1);
  };
  const double t_at_R1 = detail::gl20(tail_slope_excess, R, R + 1.0);
  const double v_at_R1 = p.eval(R + 1.0);

  auto t_value = [p, R, t_at_R1, v_at_R1, tail_slope_excess](double x) {
    const double r = std::fabs(x);
    if (r <= R) return 0.0;
    if (r <= R + 1.0) return detail::gl20(tail_slope_excess, R, r);
    return t_at_R1 + v_at_R1 - p.eval(r);
  };
  auto t_d1 = [p, R](double x) {
    const double r = std::fabs(x);
    if (r <= R) return 0.0;
    const double s = x >= 0.0 ? 1.0 : -1.0;
    if (r <= R + 1.0) return -s * detail::smootherstep(r - R) * p.eval(r, 1);
    return -s * p.eval(r, 1);
  };
  auto t_d2 = [p, R](double x) {
    const double r = std::fabs(x);
    if (r <= R) return 0.0;
    if (r <= R + 1.0)
      return -detail::smootherstep(r - R) * p.eval(r, 2) -
             detail::smootherstep_d(r - R) * p.eval(r, 1);
    return -p.eval(r, 2);
  };

  const std::optional<SmoothKernel>& old_reg = p.regular_part();
  SmoothKernel k;
  k.name = (old_reg ? old_reg->name : std::string("none")) + "+tail";
  if (old_reg) {
    SmoothKernel base = *old_reg;
    k.value = [base, t_value](double x) { return base.value(x) + t_value(x); };
    k.deriv1 = [base, t_d1](double x) { return base.deriv1(x) + t_d1(x); };
    k.deriv2 = [base, t_d2](double x) { return base.deriv2(x) + t_d2(x); };
  } else {
    k.value = t_value;
    k.deriv1 = t_d1;
    k.deriv2 = t_d2;
  }
  return InteractionPotential(p.exponent(), std::move(k));
}

}  // namespace riesz
