// cargoprice: solve, simulate and tabulate air-cargo spot pricing policies.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cargo/analysis.hpp"
#include "cargo/binary_io.hpp"
#include "cargo/errors.hpp"
#include "cargo/harness.hpp"

using namespace cargo;

namespace {

struct ScenarioArgs {
  std::string source = "toy-m3";
  std::optional<double> pf, cd, cv;
  std::optional<int> x_max;

  void attach(CLI::App* app) {
    app->add_option("--scenario", source, "toy-m3, real-m27 or a JSON scenario file")
        ->capture_default_str();
    app->add_option("--pf", pf, "penalty factor");
    app->add_option("--cd", cd, "capacity to demand ratio");
    app->add_option("--cv", cv, "coefficient of variation of weight and volume");
    app->add_option("--x-max", x_max, "override the booking-count limit");
  }

  Scenario build() const {
    auto spec = resolve_scenario(source, ScenarioFactors{pf, cd, cv});
    if (x_max) spec.max_bookings = *x_max;
    return Scenario(std::move(spec));
  }
};

void print_scenario(const Scenario& sc) {
  std::printf("scenario %s: m=%d T=%d C_w=%.6g kg C_v=%.6g cm3 pf=%g x_max=%d\n",
              sc.name().c_str(), sc.num_types(), sc.periods(), sc.capacity_weight(),
              sc.capacity_volume(), sc.penalty_factor(), sc.max_bookings());
}

GridSpec grid_for(const Scenario& sc, const std::string& size) {
  if (size.empty()) return default_grid_spec(sc);
  const auto [a, b] = parse_grid_size(size);
  return with_segments(default_grid_spec(sc), a, b);
}

void print_report(const GapReport& r) {
  std::printf("pf=%-5g cd=%-4g cv=%-4g %-4s ", r.pf, r.c_over_d, r.cv, method_name(r.method).c_str());
  if (!r.error.empty()) {
    std::printf("error: %s\n", r.error.c_str());
    return;
  }
  std::printf("revenue=%.4f %s=%.4f gap=%.3f%%", r.revenue, reference_name(r.reference_kind).c_str(),
              r.reference, r.gap_pct);
  if (r.theta_star) std::printf(" theta*=%.2f", *r.theta_star);
  if (r.standard_error) std::printf(" se=%.4f", *r.standard_error);
  std::printf("\n");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic pricing for air-cargo spot sales"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one method on one scenario");
  ScenarioArgs solve_sc;
  solve_sc.attach(solve);
  std::string method = "opt", grid_size, dump;
  double theta = 0.0;
  bool evaluate = false;
  solve->add_option("--method", method, "opt, ce, pq, aq, wv or wvs")->capture_default_str();
  solve->add_option("--theta", theta, "WVS displacement in standard deviations");
  solve->add_option("--grid", grid_size, "lattice segments, e.g. 50x50");
  solve->add_option("--dump", dump, "write the solved table to this file");
  solve->add_flag("--evaluate", evaluate, "also report the exact revenue of the policy");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy");
  ScenarioArgs sim_sc;
  sim_sc.attach(sim);
  std::string policy_dump, sim_method = "pq", sim_grid, trace;
  double sim_theta = 0.0;
  SimulationConfig sim_cfg;
  sim->add_option("--policy-dump", policy_dump, "policy file written by solve --dump");
  sim->add_option("--method", sim_method, "solve this method when no dump is given")
      ->capture_default_str();
  sim->add_option("--theta", sim_theta, "WVS displacement");
  sim->add_option("--grid", sim_grid, "lattice segments for wv/wvs");
  sim->add_option("--reps", sim_cfg.replications, "replications")->capture_default_str();
  sim->add_option("--seed", sim_cfg.seed, "base seed")->capture_default_str();
  sim->add_flag("--antithetic", sim_cfg.antithetic, "antithetic replication pairs");
  sim->add_flag("--midpoint-scale", sim_cfg.scale_at_midpoint,
                "sample reservation-price scales at period midpoints");
  sim->add_option("--trace", sim_cfg.trace_path, "per-request CSV trace");

  // grid
  auto* grid = app.add_subcommand("grid", "run an experiment grid and write gap tables");
  std::string plan_path, grid_scenario = "toy-m3", grid_grid;
  std::vector<double> cds, pfs, cvs;
  std::vector<std::string> method_names;
  std::string out_dir;
  int grid_reps = -1;
  std::uint64_t grid_seed = 0;
  bool grid_seed_set = false, upper_bound = false;
  grid->add_option("--plan", plan_path, "JSON experiment plan");
  grid->add_option("--scenario", grid_scenario, "toy-m3, real-m27 or a JSON scenario file");
  grid->add_option("--cds", cds, "C/D values");
  grid->add_option("--pfs", pfs, "pf values");
  grid->add_option("--cvs", cvs, "cv values");
  grid->add_option("--methods", method_names, "methods (opt ce pq aq wv wvs)");
  grid->add_option("--grid", grid_grid, "lattice segments, e.g. 50x50");
  grid->add_option("--reps", grid_reps, "replications for simulated cells");
  grid->add_option("--seed", grid_seed, "base seed")->each([&](const std::string&) {
    grid_seed_set = true;
  });
  grid->add_flag("--upper-bound", upper_bound, "simulate against the grid bound for every cell");
  grid->add_option("--out", out_dir, "output directory (default $CARGOPRICE_OUT or out)");

  // theta-curve
  auto* curve = app.add_subcommand("theta-curve", "WVS improvement over WV as theta varies");
  std::string curve_scenario = "toy-m3", vary = "pf", curve_out;
  std::vector<double> curve_values;
  double fix_pf = 1.25, fix_cd = 0.9, fix_cv = 0.5;
  int curve_reps = 1000;
  ThetaRange curve_range;
  curve->add_option("--scenario", curve_scenario, "scenario")->capture_default_str();
  curve->add_option("--vary", vary, "cd, pf or cv")->capture_default_str();
  curve->add_option("--values", curve_values, "values of the varied factor")->required();
  curve->add_option("--fix-pf", fix_pf, "pf when not varied")->capture_default_str();
  curve->add_option("--fix-cd", fix_cd, "C/D when not varied")->capture_default_str();
  curve->add_option("--fix-cv", fix_cv, "cv when not varied")->capture_default_str();
  curve->add_option("--theta-min", curve_range.min)->capture_default_str();
  curve->add_option("--theta-max", curve_range.max)->capture_default_str();
  curve->add_option("--theta-step", curve_range.step)->capture_default_str();
  curve->add_option("--reps", curve_reps, "replications when simulating")->capture_default_str();
  curve->add_option("--out", curve_out, "CSV path (default <out>/<scenario>/theta_<vary>.csv)");

  // check
  auto* check = app.add_subcommand("check", "run the structural property suite on toy cells");
  bool check_all = false, inject_fault = false;
  PropertyOptions check_opt;
  check_opt.cells = {ToyCell{}};
  check->add_flag("--all", check_all, "all 36 toy cells instead of the base cell");
  check->add_option("--reps", check_opt.replications, "replications per simulation check")
      ->capture_default_str();
  check->add_option("--seed", check_opt.seed)->capture_default_str();
  check->add_flag("--inject-grid-fault", inject_fault, "corrupt the finest grid (self-test)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const Scenario sc = solve_sc.build();
      print_scenario(sc);
      const Method m = parse_method(method);
      GapOptions opts;
      opts.grid = grid_for(sc, grid_size);
      CellAnalysis cell(sc, opts);
      double value = 0.0;
      switch (m) {
        case Method::Opt: value = cell.optimal().values.initial(); break;
        case Method::Ce: value = cell.certainty_equivalent().values.initial(); break;
        case Method::Pq: value = cell.pq().values(0, 0); break;
        case Method::Aq: value = cell.aq().values(0, 0); break;
        case Method::Wv:
        case Method::Wvs: value = cell.grid()->initial(); break;
      }
      std::printf("%s table value at t=0, empty hold: %.10g\n", method_name(m).c_str(), value);
      if (evaluate) {
        const double J = cell.exact_revenue(m, theta);
        const double V = cell.optimal().values.initial();
        std::printf("exact revenue %.10g, optimum %.10g, gap %.4f%%\n", J, V, gap_percent(V, J));
      }
      if (!dump.empty()) {
        switch (m) {
          case Method::Opt: write_dump(dump, sc, cell.optimal()); break;
          case Method::Ce: write_dump(dump, sc, cell.certainty_equivalent()); break;
          case Method::Pq: write_dump(dump, sc, cell.pq()); break;
          case Method::Aq: write_dump(dump, sc, cell.aq()); break;
          case Method::Wv: write_dump(dump, sc, *cell.grid(), 0.0); break;
          case Method::Wvs: write_dump(dump, sc, *cell.grid(), theta); break;
        }
        std::printf("wrote %s\n", dump.c_str());
      }
    } else if (*sim) {
      const Scenario sc = sim_sc.build();
      print_scenario(sc);
      std::shared_ptr<const PricingPolicy> policy;
      std::optional<CellAnalysis> cell;
      if (!policy_dump.empty()) {
        policy = read_policy_dump(policy_dump, sc);
      } else {
        GapOptions opts;
        opts.grid = grid_for(sc, sim_grid);
        cell.emplace(sc, opts);
        policy = cell->policy(parse_method(sim_method), sim_theta);
      }
      const auto r = simulate(sc, *policy, sim_cfg);
      std::printf("mean revenue %.6f  se %.6f  reps %d  digest %016llx\n", r.mean,
                  r.standard_error, r.replications, static_cast<unsigned long long>(r.digest));
      std::printf("overbooking frequency %.4f  negative-draw frequency %.4f\n",
                  r.overbooking_frequency, r.negative_draw_frequency);
      for (std::size_t i = 0; i < r.accepted.size(); ++i)
        std::printf("  type %zu (%s): %.3f accepted per replication\n", i,
                    sc.type(static_cast<int>(i)).label.c_str(),
                    static_cast<double>(r.accepted[i]) / r.replications);
    } else if (*grid) {
      ExperimentPlan plan = plan_path.empty() ? ExperimentPlan{} : load_plan_file(plan_path);
      if (plan_path.empty() || grid->count("--scenario")) plan.scenario = grid_scenario;
      if (!cds.empty()) plan.c_over_d = cds;
      if (!pfs.empty()) plan.pf = pfs;
      if (!cvs.empty()) plan.cv = cvs;
      if (!method_names.empty()) plan.methods = parse_methods(method_names);
      if (!grid_grid.empty()) plan.grid_segments = parse_grid_size(grid_grid);
      if (grid_reps > 0) plan.simulation.replications = grid_reps;
      if (grid_seed_set) plan.simulation.seed = grid_seed;
      if (upper_bound) plan.force_upper_bound = true;
      if (!out_dir.empty()) plan.out_dir = out_dir;
      if (plan.out_dir.empty()) plan.out_dir = default_output_dir();
      const auto reports = run_grid(plan, print_report);
      const std::string label = scenario_label(plan.scenario);
      write_results(plan.out_dir, label, reports);
      for (const auto& s : summarize(reports))
        std::printf("%-4s cv=%-4g %-4s %.3f%%\n", s.stat.c_str(), s.cv,
                    method_name(s.method).c_str(), s.gap_pct);
      for (const auto& w : soft_warnings(reports)) std::printf("warning: %s\n", w.c_str());
      std::printf("wrote %s/%s/table.csv\n", plan.out_dir.c_str(), label.c_str());
    } else if (*curve) {
      ExperimentPlan plan;
      plan.scenario = curve_scenario;
      plan.theta = curve_range;
      plan.simulation.replications = curve_reps;
      const auto slices =
          run_theta_curves(plan, parse_factor(vary), curve_values, fix_pf, fix_cd, fix_cv);
      if (curve_out.empty())
        curve_out = default_output_dir() + "/" + scenario_label(curve_scenario) + "/theta_" +
                    vary + ".csv";
      write_theta_curves(curve_out, slices);
      for (const auto& s : slices) {
        double best = 0.0;
        for (const auto& p : s.curve.points) best = std::max(best, p.improvement_pct);
        std::printf("%-8s theta*=%.2f improvement=%.4f%%\n", s.label.c_str(), s.curve.best_theta,
                    best);
      }
      std::printf("wrote %s\n", curve_out.c_str());
    } else if (*check) {
      if (check_all) check_opt.cells = full_toy_grid();
      if (inject_fault)
        check_opt.grid_fault = [](ValueGrid& g) { g.slice(0)(0, 0) += 1000.0; };
      const auto rep = run_property_suite(check_opt);
      for (const auto& c : rep.checks)
        std::printf("%s  %s  (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
      for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
      std::printf("%s\n", rep.passed() ? "all hard checks passed" : "hard check failures");
      return rep.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cargoprice: %s\n", e.what());
    return 2;
  }
  return 0;
}
