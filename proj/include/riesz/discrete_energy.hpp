#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "riesz/configuration.hpp"
#include "riesz/exact_energy.hpp"
#include "riesz/potentials.hpp"
#include "riesz/summation.hpp"

namespace riesz {

struct EnergyBreakdown {
  double total = 0.0;
  double interaction = 0.0;
  double confinement = 0.0;
  double nearest_neighbour = 0.0;
  double diagonal_block = 0.0;

  bool finite() const { return std::isfinite(total); }
};

// E_n^{nn}(x) = (1/n^2) sum_i V(l_i): the adjacent-pair part of the interaction.
inline double nearest_neighbour_energy(const Configuration& c,
                                       const InteractionPotential& V) {
  const int n = c.n();
  KahanSum s;
  for (int i = 1; i <= n; ++i) s.add(V.eval(c[i] - c[i - 1]));
  return s.value() / (static_cast<double>(n) * n);
}

// D_n(x) = (1/2n^2) sum_i l_i^{-2} int int_{(0,l_i)^2} V: per-cell
// self-interaction of phi, V_a in closed form, V_reg by quadrature.
inline double diagonal_block_energy(const Configuration& c,
                                    const InteractionPotential& V,
                                    int reg_order = 24) {
  const int n = c.n();
  KahanSum s;
  for (int i = 1; i <= n; ++i) {
    const double l = c[i] - c[i - 1];
    double block =
        2.0 * static_cast<double>(detail::second_antiderivative_Va(V.a(), l));
    if (V.has_regular_part())
      block += rect_integral_Vreg(*V.regular_part(), 0.0, l, 0.0, l, reg_order);
    s.add(block / (l * l));
  }
  return 0.5 * s.value() / (static_cast<double>(n) * n);
}

// E_n(x) = (1/n^2) sum_{i>j} V(x_i - x_j) + (1/n) sum_i U(x_i).
// Infinite energies are values, not errors: particles outside D(U) give +inf.
inline EnergyBreakdown energy(const Configuration& c,
                              const InteractionPotential& V,
                              const ConfiningPotential& U) {
  const int n = c.n();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);

  EnergyBreakdown out;
  KahanSum inter;
  for (int i = 1; i <= n; ++i)
    for (int j = 0; j < i; ++j) inter.add(V.eval(c[i] - c[j]));
  out.interaction = inter.value() * inv_n2;

  KahanSum conf;
  bool escaped = false;
  for (int i = 0; i <= n; ++i) {
    const double u = U.eval(c[i]);
    if (!std::isfinite(u)) {
      escaped = true;
      break;
    }
    conf.add(u);
  }
  out.confinement = escaped ? kInf : conf.value() / static_cast<double>(n);
  out.total = out.interaction + out.confinement;
  out.nearest_neighbour = nearest_neighbour_energy(c, V);
  out.diagonal_block = diagonal_block_energy(c, V);
  return out;
}

// Analytic gradient; requires all particles strictly interior to D(U).
inline std::vector<double> gradient(const Configuration& c,
                                    const InteractionPotential& V,
                                    const ConfiningPotential& U) {
  const int n = c.n();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  std::vector<long double> acc(n + 1, 0.0L);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (c[i] == c[j]) throw std::domain_error("gradient: particle collision");
      const double dv = V.eval(c[i] - c[j], 1);
      acc[i] += dv;
      acc[j] -= dv;
    }
  }
  std::vector<double> g(n + 1);
  for (int k = 0; k <= n; ++k)
    g[k] = static_cast<double>(acc[k]) * inv_n2 +
           U.deriv(c[k], 1) / static_cast<double>(n);
  return g;
}

// Gradient plus a per-coordinate rounding-floor estimate: the smallest
// gradient magnitude distinguishable from zero given (a) accumulation noise in
// the V' sum and (b) the quantisation of x_k itself (one ulp of x_k moves g_k
// by about H_kk * ulp). A minimiser cannot be polished below this floor.
struct GradientWithFloor {
  std::vector<double> g;
  std::vector<double> floor;
};

inline GradientWithFloor gradient_with_floor(const Configuration& c,
                                             const InteractionPotential& V,
                                             const ConfiningPotential& U) {
  const int n = c.n();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<long double> acc(n + 1, 0.0L);
  std::vector<double> mag(n + 1, 0.0), hdiag(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (c[i] == c[j])
        throw std::domain_error("gradient_with_floor: particle collision");
      const double dv = V.eval(c[i] - c[j], 1);
      const double d2 = V.eval(c[i] - c[j], 2);
      acc[i] += dv;
      acc[j] -= dv;
      mag[i] += std::fabs(dv);
      mag[j] += std::fabs(dv);
      hdiag[i] += std::fabs(d2);
      hdiag[j] += std::fabs(d2);
    }
  }
  GradientWithFloor out;
  out.g.resize(n + 1);
  out.floor.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double du = U.deriv(c[k], 1);
    out.g[k] = static_cast<double>(acc[k]) * inv_n2 + du / static_cast<double>(n);
    const double sum_scale = mag[k] * inv_n2 + std::fabs(du) / n;
    const double quant_scale =
        (hdiag[k] * inv_n2 + std::fabs(U.deriv(c[k], 2)) / n) * std::fabs(c[k]);
    out.floor[k] = 4.0 * eps * (sum_scale + quant_scale);
  }
  return out;
}

// Dense Hessian. Row sums equal (1/n) U''(x_k): with U = 0 the all-ones vector
// spans the translation nullspace.
inline Eigen::MatrixXd hessian(const Configuration& c,
                               const InteractionPotential& V,
                               const ConfiningPotential& U) {
  const int n = c.n();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (c[i] == c[j]) throw std::domain_error("hessian: particle collision");
      const double d2 = V.eval(c[i] - c[j], 2) * inv_n2;
      h(i, i) += d2;
      h(j, j) += d2;
      h(i, j) -= d2;
      h(j, i) -= d2;
    }
  }
  for (int k = 0; k <= n; ++k) h(k, k) += U.deriv(c[k], 2) / static_cast<double>(n);
  return h;
}

// Matrix-free Hessian-vector product, O(n^2) per apply, no storage.
inline std::vector<double> hessian_apply(const Configuration& c,
                                         const InteractionPotential& V,
                                         const ConfiningPotential& U,
                                         const std::vector<double>& v) {
  const int n = c.n();
  if (static_cast<int>(v.size()) != n + 1)
    throw std::invalid_argument("hessian_apply: dimension mismatch");
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  std::vector<long double> acc(n + 1, 0.0L);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double d2 = V.eval(c[i] - c[j], 2) * inv_n2;
      const double diff = v[i] - v[j];
      acc[i] += d2 * diff;
      acc[j] -= d2 * diff;
    }
  }
  std::vector<double> out(n + 1);
  for (int k = 0; k <= n; ++k)
    out[k] = static_cast<double>(acc[k]) +
             U.deriv(c[k], 2) / static_cast<double>(n) * v[k];
  return out;
}

}  // namespace riesz
