#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riesz/configuration.hpp"
#include "riesz/discrete_energy.hpp"
#include "riesz/potentials.hpp"

namespace riesz {

enum class Initializer { Equispaced, Quantile };
enum class HessianMode { Dense, MatrixFreeCG };

struct SolverOptions {
  double gradient_tolerance = 1e-12;  // on n * max projected-gradient entry
  int max_iterations = 200;
  Initializer initializer = Initializer::Quantile;
  HessianMode hessian_mode = HessianMode::Dense;
  double backtrack_shrink = 0.5;
  double sufficient_decrease = 1e-4;
  // Explicit start point; when absent, minimize() builds one from `initializer`
  // (Quantile needs one supplied, the solver itself has no equilibrium data).
  std::optional<Configuration> initial;
};

struct SolveReport {
  Configuration minimizer;
  int iterations = 0;
  double final_projected_gradient_norm = kInf;  // n-scaled
  std::set<int> active_bounds;
  EnergyBreakdown energy;
  bool all_in_support = false;  // all x_i in [0,1], the support of rho
  bool converged = false;
  std::string message;
};

namespace detail {

inline double bound_snap_tol(double z) { return 1e-12 * (1.0 + std::fabs(z)); }

// KKT violation per coordinate: |g| in the interior, one-sided at the bounds.
inline double kkt_violation(double x, double g, double z1, double z2) {
  if (std::isfinite(z1) && x <= z1 + bound_snap_tol(z1)) return std::max(0.0, -g);
  if (std::isfinite(z2) && x >= z2 - bound_snap_tol(z2)) return std::max(0.0, g);
  return std::fabs(g);
}

// Conjugate gradient on the free subspace with a matrix-free Hessian apply.
inline std::vector<double> newton_direction_cg(
    const Configuration& c, const InteractionPotential& V,
    const ConfiningPotential& U, const std::vector<double>& g,
    const std::vector<int>& free_idx, double reg) {
  const int n = c.n();
  const int m = static_cast<int>(free_idx.size());
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> full(n + 1, 0.0);
    for (int k = 0; k < m; ++k) full[free_idx[k]] = v[k];
    std::vector<double> hv = hessian_apply(c, V, U, full);
    std::vector<double> out(m);
    for (int k = 0; k < m; ++k) out[k] = hv[free_idx[k]] + reg * v[k];
    return out;
  };
  std::vector<double> b(m);
  for (int k = 0; k < m; ++k) b[k] = -g[free_idx[k]];
  std::vector<double> x(m, 0.0), r = b, p = r;
  double rs = 0.0;
  for (double v : r) rs += v * v;
  const double rs0 = rs;
  for (int iter = 0; iter < 10 * m + 50 && rs > 1e-24 * rs0; ++iter) {
    std::vector<double> ap = apply(p);
    double pap = 0.0;
    for (int k = 0; k < m; ++k) pap += p[k] * ap[k];
    if (pap <= 0.0) break;  // numerical loss of definiteness
    const double alpha = rs / pap;
    for (int k = 0; k < m; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    double rs_new = 0.0;
    for (double v : r) rs_new += v * v;
    const double beta = rs_new / rs;
    rs = rs_new;
    for (int k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
  }
  return x;
}

inline std::vector<double> newton_direction_dense(
    const Configuration& c, const InteractionPotential& V,
    const ConfiningPotential& U, const std::vector<double>& g,
    const std::vector<int>& free_idx) {
  const int m = static_cast<int>(free_idx.size());
  Eigen::MatrixXd h_full = hessian(c, V, U);
  Eigen::MatrixXd h(m, m);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    rhs(r) = -g[free_idx[r]];
    for (int s = 0; s < m; ++s) h(r, s) = h_full(free_idx[r], free_idx[s]);
  }
  double reg = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd h_reg = h;
    if (reg > 0.0) h_reg.diagonal().array() += reg;
    Eigen::LLT<Eigen::MatrixXd> llt(h_reg);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(rhs);
      std::vector<double> out(m);
      for (int k = 0; k < m; ++k) out[k] = d(k);
      return out;
    }
    reg = (reg == 0.0) ? 1e-12 * h.trace() / m : 10.0 * reg;
  }
  // steepest descent fallback
  std::vector<double> out(m);
  for (int k = 0; k < m; ++k) out[k] = rhs(k);
  return out;
}

}  // namespace detail

inline Configuration equispaced_configuration(int n, double lo, double hi) {
  std::vector<double> x(n + 1);
  for (int i = 0; i <= n; ++i)
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  return Configuration(std::move(x));
}

// Damped projected Newton with an active set on the box [z1, z2].
// Ordering is maintained throughout: the step is capped so no gap shrinks by
// more than 50% per iteration.
inline SolveReport minimize(int n, const InteractionPotential& V,
                            const ConfiningPotential& U,
                            const SolverOptions& options = {}) {
  if (n < 1) throw std::invalid_argument("minimize: n >= 1 required");
  const double z1 = U.lower(), z2 = U.upper();

  std::vector<double> x;
  if (options.initial) {
    if (options.initial->n() != n)
      throw std::invalid_argument("minimize: initial configuration has wrong n");
    x = options.initial->positions();
  } else {
    const double lo = std::isfinite(z1) ? z1 : 0.0;
    const double hi = std::isfinite(z2) ? z2 : 1.0;
    x = equispaced_configuration(n, lo, hi).positions();
  }

  const double scale_n = static_cast<double>(n);
  double current_energy = energy(Configuration(x), V, U).total;

  int iterations = 0;
  double residual = kInf;
  bool converged = false;
  std::string message;
  double best_residual = kInf;
  int stagnant_iters = 0;

  for (; iterations < options.max_iterations; ++iterations) {
    const Configuration c(x);
    const std::vector<double> g = gradient(c, V, U);

    residual = 0.0;
    for (int k = 0; k <= n; ++k)
      residual = std::max(residual, detail::kkt_violation(x[k], g[k], z1, z2));
    residual *= scale_n;
    if (residual <= options.gradient_tolerance) {
      converged = true;
      break;
    }
    if (residual <= 1e5 * options.gradient_tolerance) {
      // near-converged: check whether the remaining violation is below the
      // double-precision rounding floor of the gradient itself
      const GradientWithFloor gf = gradient_with_floor(c, V, U);
      bool at_floor = true;
      for (int k = 0; k <= n; ++k) {
        const double viol = detail::kkt_violation(x[k], gf.g[k], z1, z2);
        if (viol > options.gradient_tolerance / scale_n && viol > gf.floor[k]) {
          at_floor = false;
          break;
        }
      }
      if (at_floor) {
        converged = true;
        message = "stationary at floating-point resolution";
        break;
      }
      // ulp-level wobble: residual no longer improving and already tiny
      if (residual > 0.9 * best_residual) {
        if (++stagnant_iters >= 15) {
          converged = true;
          message = "progress stalled at floating-point resolution";
          break;
        }
      } else {
        stagnant_iters = 0;
      }
    }
    best_residual = std::min(best_residual, residual);

    // active set: pinned at a bound with the gradient pointing outward
    std::vector<int> free_idx;
    free_idx.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
      const bool at_lo =
          std::isfinite(z1) && x[k] <= z1 + detail::bound_snap_tol(z1) && g[k] >= 0.0;
      const bool at_hi =
          std::isfinite(z2) && x[k] >= z2 - detail::bound_snap_tol(z2) && g[k] <= 0.0;
      if (!at_lo && !at_hi) free_idx.push_back(k);
    }
    if (free_idx.empty()) {
      converged = true;
      break;
    }

    std::vector<double> d_free =
        (options.hessian_mode == HessianMode::Dense && n <= 4096)
            ? detail::newton_direction_dense(c, V, U, g, free_idx)
            : detail::newton_direction_cg(c, V, U, g, free_idx, 0.0);

    std::vector<double> d(n + 1, 0.0);
    double slope = 0.0;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      d[free_idx[k]] = d_free[k];
      slope += d_free[k] * g[free_idx[k]];
    }
    if (!(slope < 0.0)) {
      // not a descent direction; fall back to the projected gradient
      slope = 0.0;
      for (int idx : free_idx) {
        d[idx] = -g[idx];
        slope -= g[idx] * g[idx];
      }
    }

    // step cap: each gap may shrink by at most 50%, and free coordinates stop
    // exactly at the box bounds
    double t_max = 1.0;
    for (int i = 1; i <= n; ++i) {
      const double delta = d[i] - d[i - 1];
      if (delta < 0.0) t_max = std::min(t_max, 0.5 * (x[i] - x[i - 1]) / (-delta));
    }
    for (int idx : free_idx) {
      if (std::isfinite(z1) && d[idx] < 0.0 && x[idx] > z1)
        t_max = std::min(t_max, (x[idx] - z1) / (-d[idx]));
      if (std::isfinite(z2) && d[idx] > 0.0 && x[idx] < z2)
        t_max = std::min(t_max, (z2 - x[idx]) / d[idx]);
    }

    double t = t_max;
    bool accepted = false;
    std::vector<double> trial(n + 1);
    for (int ls = 0; ls < 70; ++ls) {
      for (int k = 0; k <= n; ++k) {
        trial[k] = x[k] + t * d[k];
        if (std::isfinite(z1)) trial[k] = std::max(trial[k], z1);
        if (std::isfinite(z2)) trial[k] = std::min(trial[k], z2);
      }
      double e_trial;
      try {
        e_trial = energy(Configuration(trial), V, U).total;
      } catch (const std::invalid_argument&) {
        e_trial = kInf;  // rounding collapsed a gap; reject by value
      }
      if (e_trial <= current_energy + options.sufficient_decrease * t * slope) {
        x = trial;
        current_energy = e_trial;
        accepted = true;
        break;
      }
      t *= options.backtrack_shrink;
    }
    if (!accepted) {
      message = "line search stalled";
      converged = residual <= 1e4 * options.gradient_tolerance;
      break;
    }
  }

  if (!converged && message.empty()) message = "max iterations reached";

  Configuration result(x);
  SolveReport report{.minimizer = result,
                     .iterations = iterations,
                     .final_projected_gradient_norm = residual,
                     .active_bounds = {},
                     .energy = energy(result, V, U),
                     .all_in_support = true,
                     .converged = converged,
                     .message = message};
  for (int k = 0; k <= n; ++k) {
    if ((std::isfinite(z1) && x[k] <= z1 + detail::bound_snap_tol(z1)) ||
        (std::isfinite(z2) && x[k] >= z2 - detail::bound_snap_tol(z2)))
      report.active_bounds.insert(k);
    if (x[k] < -1e-12 || x[k] > 1.0 + 1e-12) report.all_in_support = false;
  }
  return report;
}

struct KktSummary {
  double max_residual = 0.0;  // n-scaled, same metric as the solver
  std::vector<int> wrong_sign_active;
};

inline KktSummary verify_kkt(const SolveReport& report,
                             const InteractionPotential& V,
                             const ConfiningPotential& U) {
  const Configuration& c = report.minimizer;
  const int n = c.n();
  const std::vector<double> g = gradient(c, V, U);
  const double z1 = U.lower(), z2 = U.upper();
  KktSummary out;
  for (int k = 0; k <= n; ++k) {
    out.max_residual = std::max(
        out.max_residual, static_cast<double>(n) *
                              detail::kkt_violation(c[k], g[k], z1, z2));
  }
  for (int k : report.active_bounds) {
    const bool at_lo = std::isfinite(z1) && c[k] <= z1 + detail::bound_snap_tol(z1);
    if ((at_lo && g[k] < 0.0) || (!at_lo && g[k] > 0.0))
      out.wrong_sign_active.push_back(k);
  }
  return out;
}

}  // namespace riesz
