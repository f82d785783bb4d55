// riesz_gas: experiment runner for 1D Riesz/log-gas energy minimisation.
//
//   riesz_gas sweep  [--case ...] [--a ...] [--nexp min:max] [--out dir] ...
//   riesz_gas single --case box --a 0.5 --n 64
//
// Sweeps write per-(case, a) CSV tables plus a summary.json; single prints one
// solve report as JSON to stdout. Exit codes: 0 ok, 1 bad arguments or
// unusable output directory, 2 one or more solves failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riesz/metrics.hpp"
#include "riesz/minimizer.hpp"
#include "riesz/sweep.hpp"

using namespace riesz;

namespace {

int parse_cases(const std::vector<std::string>& names, std::vector<CaseId>& out) {
  out.clear();
  for (const std::string& name : names) {
    if (name == "box")
      out.push_back(CaseId::BoundedBox);
    else if (name == "quadratic")
      out.push_back(CaseId::QuadraticConfinement);
    else
      return 1;
  }
  return 0;
}

int parse_nexp(const std::string& spec, int& lo, int& hi) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) return 1;
  try {
    lo = std::stoi(spec.substr(0, colon));
    hi = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    return 1;
  }
  return 0;
}

int apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read config file: " << path << "\n";
    return 1;
  }
  nlohmann::json j;
  try {
    in >> j;
    if (j.contains("cases") &&
        parse_cases(j["cases"].get<std::vector<std::string>>(), cfg.cases))
      return 1;
    if (j.contains("a_values"))
      cfg.a_values = j["a_values"].get<std::vector<double>>();
    if (j.contains("n_min_exp")) cfg.n_min_exp = j["n_min_exp"].get<int>();
    if (j.contains("n_max_exp")) cfg.n_max_exp = j["n_max_exp"].get<int>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("write_csv")) cfg.write_csv = j["write_csv"].get<bool>();
    if (j.contains("write_json")) cfg.write_json = j["write_json"].get<bool>();
    if (j.contains("force")) cfg.force = j["force"].get<bool>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("tol"))
      cfg.solver.gradient_tolerance = j["tol"].get<double>();
    if (j.contains("init"))
      cfg.solver.initializer = j["init"].get<std::string>() == "equispaced"
                                   ? Initializer::Equispaced
                                   : Initializer::Quantile;
    if (j.contains("hessian"))
      cfg.solver.hessian_mode = j["hessian"].get<std::string>() == "cg"
                                    ? HessianMode::MatrixFreeCG
                                    : HessianMode::Dense;
  } catch (const std::exception& e) {
    std::cerr << "bad config file: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

nlohmann::json report_to_json(const SolveReport& report,
                              const ConvergenceRecord& rec,
                              const SandwichResult& sandwich, double residual) {
  nlohmann::json j;
  j["case"] = case_name(rec.case_id);
  j["a"] = rec.a;
  j["n"] = rec.n;
  j["converged"] = report.converged;
  j["message"] = report.message;
  j["iterations"] = report.iterations;
  j["projected_gradient_norm"] = report.final_projected_gradient_norm;
  j["active_bounds"] = std::vector<int>(report.active_bounds.begin(),
                                        report.active_bounds.end());
  j["all_in_support"] = report.all_in_support;
  j["minimizer"] = report.minimizer.positions();
  j["E_n"] = rec.energy_discrete;
  j["E_phi"] = rec.energy_phi;
  j["E_rho"] = rec.energy_continuum;
  j["e_n"] = rec.e_n;
  j["lower_gap"] = sandwich.lower_gap;
  j["residual"] = residual;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riesz/log-gas particle energy experiments"};
  app.require_subcommand(1);

  // shared option state
  std::vector<std::string> case_names = {"box", "quadratic"};
  std::vector<double> a_values = {0.0, 0.25, 0.5, 0.75};
  std::string nexp = "2:10";
  double tol = 1e-12;
  std::string init = "quantile";
  std::string hessian = "dense";
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};
  bool force = false;
  int threads = 0;
  std::string config_path;
  int n_single = 64;

  CLI::App* sweep = app.add_subcommand("sweep", "run the (case, a, n) grid");
  sweep->add_option("--case", case_names, "box and/or quadratic");
  sweep->add_option("--a", a_values, "interaction exponents in [0,1)");
  sweep->add_option("--nexp", nexp, "exponent range min:max, n = 2^k");
  sweep->add_option("--tol", tol, "solver gradient tolerance");
  sweep->add_option("--init", init, "quantile or equispaced");
  sweep->add_option("--hessian", hessian, "dense or cg");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--format", formats, "csv and/or json");
  sweep->add_flag("--force", force, "recompute cached solves");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
  sweep->add_option("--config", config_path, "JSON config file");

  CLI::App* single = app.add_subcommand("single", "one solve, JSON to stdout");
  std::string single_case = "box";
  double single_a = 0.0;
  single->add_option("--case", single_case, "box or quadratic");
  single->add_option("--a", single_a, "interaction exponent in [0,1)");
  single->add_option("--n", n_single, "number of gaps (n+1 particles)");
  single->add_option("--tol", tol, "solver gradient tolerance");
  single->add_option("--init", init, "quantile or equispaced");
  single->add_option("--hessian", hessian, "dense or cg");

  CLI11_PARSE(app, argc, argv);

  SolverOptions solver;
  solver.gradient_tolerance = tol;
  if (init == "equispaced")
    solver.initializer = Initializer::Equispaced;
  else if (init != "quantile") {
    std::cerr << "unknown --init: " << init << "\n";
    return 1;
  }
  if (hessian == "cg")
    solver.hessian_mode = HessianMode::MatrixFreeCG;
  else if (hessian != "dense") {
    std::cerr << "unknown --hessian: " << hessian << "\n";
    return 1;
  }

  if (sweep->parsed()) {
    ExperimentConfig cfg;
    cfg.solver = solver;
    if (parse_cases(case_names, cfg.cases)) {
      std::cerr << "unknown --case value; expected box or quadratic\n";
      return 1;
    }
    cfg.a_values = a_values;
    if (parse_nexp(nexp, cfg.n_min_exp, cfg.n_max_exp)) {
      std::cerr << "bad --nexp; expected min:max\n";
      return 1;
    }
    cfg.out_dir = out_dir;
    cfg.force = force;
    cfg.threads = threads;
    cfg.write_csv = cfg.write_json = false;
    for (const std::string& f : formats) {
      if (f == "csv")
        cfg.write_csv = true;
      else if (f == "json")
        cfg.write_json = true;
      else {
        std::cerr << "unknown --format: " << f << "\n";
        return 1;
      }
    }
    if (!config_path.empty() && apply_config_file(config_path, cfg)) return 1;

    std::string err;
    const int rc = run_sweep(cfg, &err);
    if (rc != 0) std::cerr << "sweep: " << err << "\n";
    if (rc == 1) std::cerr << "usage: riesz_gas sweep --a <list in [0,1)> --nexp min:max --out <writable dir>\n";
    return rc;
  }

  // single
  std::vector<CaseId> one_case;
  if (parse_cases({single_case}, one_case)) {
    std::cerr << "unknown --case value; expected box or quadratic\n";
    return 1;
  }
  if (!(single_a >= 0.0 && single_a < 1.0)) {
    std::cerr << "a must lie in [0, 1)\n";
    return 1;
  }
  if (n_single < 1) {
    std::cerr << "n must be >= 1\n";
    return 1;
  }
  try {
    const EquilibriumCase eq = make_equilibrium_case(one_case[0], single_a);
    const InteractionPotential V = case_interaction(eq);
    const ConfiningPotential U = case_confinement(eq);
    if (!solver.initial)
      solver.initial = (solver.initializer == Initializer::Quantile)
                           ? quantile_configuration(eq, n_single)
                           : equispaced_configuration(n_single, 0.0, 1.0);
    const SolveReport report = minimize(n_single, V, U, solver);
    const ConvergenceRecord rec = compute_en(report, eq);
    const SandwichResult sandwich = check_sandwich(report.minimizer, V, U);
    const double residual = check_lower_bound_residual(report.minimizer, eq, V);
    std::cout << report_to_json(report, rec, sandwich, residual).dump(2)
              << std::endl;
    return report.converged ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "single: " << e.what() << "\n";
    return 2;
  }
}
