#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "riesz/continuum.hpp"
#include "riesz/metrics.hpp"
#include "riesz/minimizer.hpp"

namespace riesz {

struct ExperimentConfig {
  std::vector<CaseId> cases = {CaseId::BoundedBox, CaseId::QuadraticConfinement};
  std::vector<double> a_values = {0.0, 0.25, 0.5, 0.75};
  int n_min_exp = 2;
  int n_max_exp = 10;
  SolverOptions solver;
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  bool force = false;
  int threads = 0;  // 0 = hardware concurrency
};

namespace detail {

inline std::string format_a_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", a);
  return buf;
}

struct SolveRow {
  int n = 0;
  bool ok = false;
  std::string message;
  ConvergenceRecord record;
  double lower_gap = 0.0;
  double upper_ratio = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> positions;
};

inline nlohmann::json row_to_json(const SolveRow& row) {
  return nlohmann::json{{"n", row.n},
                        {"ok", row.ok},
                        {"message", row.message},
                        {"e_n", row.record.e_n},
                        {"E_n", row.record.energy_discrete},
                        {"E_phi", row.record.energy_phi},
                        {"E_rho", row.record.energy_continuum},
                        {"all_in_support", row.record.all_in_support},
                        {"lower_gap", row.lower_gap},
                        {"upper_ratio", row.upper_ratio},
                        {"residual", row.residual},
                        {"iterations", row.iterations},
                        {"positions", row.positions}};
}

inline SolveRow row_from_json(const nlohmann::json& j, const EquilibriumCase& eq) {
  SolveRow row;
  row.n = j.at("n").get<int>();
  row.ok = j.at("ok").get<bool>();
  row.message = j.at("message").get<std::string>();
  row.record.n = row.n;
  row.record.a = eq.a;
  row.record.case_id = eq.case_id;
  row.record.e_n = j.at("e_n").get<double>();
  row.record.energy_discrete = j.at("E_n").get<double>();
  row.record.energy_phi = j.at("E_phi").get<double>();
  row.record.energy_continuum = j.at("E_rho").get<double>();
  row.record.all_in_support = j.at("all_in_support").get<bool>();
  row.lower_gap = j.at("lower_gap").get<double>();
  row.upper_ratio = j.at("upper_ratio").get<double>();
  row.residual = j.at("residual").get<double>();
  row.iterations = j.at("iterations").get<int>();
  row.positions = j.at("positions").get<std::vector<double>>();
  return row;
}

inline SolveRow solve_one(const EquilibriumCase& eq, int n,
                          const SolverOptions& base_options) {
  SolveRow row;
  row.n = n;
  try {
    const InteractionPotential V = case_interaction(eq);
    const ConfiningPotential U = case_confinement(eq);
    SolverOptions options = base_options;
    if (!options.initial) {
      options.initial = (options.initializer == Initializer::Quantile)
                            ? quantile_configuration(eq, n)
                            : equispaced_configuration(n, 0.0, 1.0);
    }
    const SolveReport report = minimize(n, V, U, options);
    row.ok = report.converged;
    row.message = report.message;
    row.iterations = report.iterations;
    row.positions = report.minimizer.positions();
    row.record = compute_en(report, eq);
    const SandwichResult sandwich = check_sandwich(report.minimizer, V, U);
    row.lower_gap = sandwich.lower_gap;
    row.upper_ratio = sandwich.upper_ratio;
    row.residual = check_lower_bound_residual(report.minimizer, eq, V);
  } catch (const std::exception& e) {
    row.ok = false;
    row.message = e.what();
  }
  return row;
}

}  // namespace detail

// Runs the full (case, a, n) grid and writes the result tables.
// Returns 0 on success, 1 on unusable configuration or unwritable output,
// 2 if any solve failed (partial outputs are still written).
inline int run_sweep(const ExperimentConfig& config, std::string* error = nullptr) {
  namespace fs = std::filesystem;
  auto fail = [&error](const std::string& msg, int code) {
    if (error) *error = msg;
    return code;
  };

  if (config.cases.empty()) return fail("no cases selected", 1);
  if (config.a_values.empty()) return fail("no a values selected", 1);
  if (config.n_min_exp < 1 || config.n_max_exp < config.n_min_exp)
    return fail("invalid n exponent range", 1);
  for (double a : config.a_values)
    if (!(a >= 0.0 && a < 1.0)) return fail("a values must lie in [0, 1)", 1);

  std::error_code ec;
  fs::create_directories(fs::path(config.out_dir) / "raw", ec);
  if (ec) return fail("cannot create output directory: " + config.out_dir, 1);
  {
    const fs::path probe = fs::path(config.out_dir) / ".write_probe";
    std::ofstream test(probe);
    if (!test) return fail("output directory not writable: " + config.out_dir, 1);
    test.close();
    fs::remove(probe, ec);
  }

  struct Task {
    EquilibriumCase eq;
    int n;
    fs::path raw_path;
  };
  std::vector<Task> tasks;
  for (CaseId id : config.cases) {
    for (double a : config.a_values) {
      const EquilibriumCase eq = make_equilibrium_case(id, a);
      for (int k = config.n_min_exp; k <= config.n_max_exp; ++k) {
        const int n = 1 << k;
        const fs::path raw = fs::path(config.out_dir) / "raw" /
                             (std::string(case_name(id)) + "_" +
                              detail::format_a_label(a) + "_" +
                              std::to_string(n) + ".json");
        tasks.push_back({eq, n, raw});
      }
    }
  }

  std::vector<detail::SolveRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int nthreads = std::max(
      1, std::min(config.threads > 0 ? config.threads : (hw > 0 ? hw : 4),
                  static_cast<int>(tasks.size())));
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const Task& task = tasks[idx];
      bool reused = false;
      if (!config.force && fs::exists(task.raw_path)) {
        try {
          std::ifstream in(task.raw_path);
          nlohmann::json j;
          in >> j;
          rows[idx] = detail::row_from_json(j, task.eq);
          reused = true;
        } catch (const std::exception&) {
          reused = false;  // corrupt cache entry: recompute
        }
      }
      if (!reused) {
        rows[idx] = detail::solve_one(task.eq, task.n, config.solver);
        std::ofstream out(task.raw_path);
        out << detail::row_to_json(rows[idx]).dump(2) << "\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // --- assemble tables, deterministic order ---------------------------------
  bool any_failed = false;
  nlohmann::json summary = nlohmann::json::object();
  std::ofstream diag;
  if (config.write_csv) {
    diag.open(fs::path(config.out_dir) / "diagnostics.csv");
    diag << record_csv_header() << "\n";
  }

  std::size_t idx = 0;
  for (CaseId id : config.cases) {
    for (double a : config.a_values) {
      const std::string label =
          std::string(case_name(id)) + "_" + detail::format_a_label(a);
      const int count = config.n_max_exp - config.n_min_exp + 1;
      std::vector<detail::SolveRow*> group(count);
      for (int k = 0; k < count; ++k) group[k] = &rows[idx++];

      // p(n) pairs e_n with e_{2n}
      std::vector<std::optional<double>> p(count);
      for (int k = 0; k + 1 < count; ++k) {
        detail::SolveRow* cur = group[k];
        detail::SolveRow* dbl = group[k + 1];
        if (cur->ok && dbl->ok && cur->record.e_n > 0.0 && dbl->record.e_n > 0.0)
          p[k] = rate_estimate(cur->record.e_n, dbl->record.e_n);
        cur->record.p = p[k];
      }

      if (config.write_csv) {
        std::ofstream en(fs::path(config.out_dir) / ("en_" + label + ".csv"));
        en << "n,e_n,E_n,E_phi,E_rho,all_in_support\n";
        std::ofstream pf(fs::path(config.out_dir) / ("p_" + label + ".csv"));
        pf << "n,p\n";
        for (int k = 0; k < count; ++k) {
          const detail::SolveRow& row = *group[k];
          if (!row.ok) any_failed = true;
          en << row.n << "," << format_full(row.record.e_n) << ","
             << format_full(row.record.energy_discrete) << ","
             << format_full(row.record.energy_phi) << ","
             << format_full(row.record.energy_continuum) << ","
             << (row.record.all_in_support ? "true" : "false") << "\n";
          if (p[k]) pf << row.n << "," << format_full(*p[k]) << "\n";
          diag << record_csv_row(row.record, row.lower_gap, row.residual) << "\n";
        }
      } else {
        for (int k = 0; k < count; ++k)
          if (!group[k]->ok) any_failed = true;
      }

      // summary: average p over the last four available n
      std::vector<double> tail;
      for (int k = count - 1; k >= 0 && static_cast<int>(tail.size()) < 4; --k)
        if (p[k]) tail.push_back(*p[k]);
      nlohmann::json entry;
      entry["case"] = case_name(id);
      entry["a"] = a;
      if (!tail.empty()) {
        double s = 0.0;
        for (double v : tail) s += v;
        entry["p_last4_avg"] = s / tail.size();
        entry["p_count"] = tail.size();
      } else {
        entry["p_last4_avg"] = nullptr;
        entry["p_count"] = 0;
      }
      bool group_ok = true;
      for (int k = 0; k < count; ++k) group_ok = group_ok && group[k]->ok;
      entry["all_solves_converged"] = group_ok;
      summary[label] = entry;
    }
  }

  if (config.write_json) {
    std::ofstream out(fs::path(config.out_dir) / "summary.json");
    out << summary.dump(2) << "\n";
  }
  if (any_failed) return fail("one or more solves failed", 2);
  return 0;
}

}  // namespace riesz
