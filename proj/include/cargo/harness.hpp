#pragma once

// Experiment orchestration: factor grids in the layout of the gap tables,
// theta curves, the structural property suite, and CSV persistence.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cargo/analysis.hpp"
#include "cargo/scenario_io.hpp"

namespace cargo {

struct ExperimentPlan {
  std::string scenario = "toy-m3";  // built-in name or JSON path
  std::vector<double> c_over_d = {0.8, 0.9, 1.0, 1.1};
  std::vector<double> pf = {1.0, 1.25, 1.5};
  std::vector<double> cv = {0.2, 0.3, 0.5};
  std::vector<Method> methods = {Method::Pq, Method::Aq, Method::Wv, Method::Wvs};
  // Segment counts over each cell's default lattice extent; default lattice when unset.
  std::optional<std::pair<int, int>> grid_segments;
  SimulationConfig simulation;
  ThetaRange theta;
  std::string out_dir;  // empty: no files written
  // Simulate against the grid bound even when the exact optimum is tractable.
  bool force_upper_bound = false;
};

/// Plan document: {scenario, c_over_d, pf, cv, methods, grid: "AxB",
/// replications, seed, antithetic, theta: {min, max, step}, out, upper_bound}.
/// Missing fields keep their defaults.
ExperimentPlan parse_plan(const std::string& json_text);
ExperimentPlan load_plan_file(const std::string& path);

/// "AxB" -> (A, B).
std::pair<int, int> parse_grid_size(const std::string& text);

/// Built-in name, or the file stem of a scenario path.
std::string scenario_label(const std::string& source);

/// Output directory from CARGOPRICE_OUT, else "out".
std::string default_output_dir();

/// Whether solve_general fits the state budget for this scenario.
bool exact_tractable(const Scenario& scenario);

/// One report per (cv, pf, C/D, method) cell in that order. Failed cells carry
/// the message in `error` and the run continues.
std::vector<GapReport> run_grid(const ExperimentPlan& plan,
                                const std::function<void(const GapReport&)>& progress = {});

struct SummaryRow {
  std::string stat;  // "min", "mean", "max"
  double cv = 0;
  Method method = Method::Pq;
  double gap_pct = 0;
};

/// Min / mean / max of gap_pct per (cv block, method), cv in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<GapReport>& reports);

void write_gap_table(const std::string& path, const std::vector<GapReport>& reports);
/// Cell rows and summary rows exactly as stored.
struct GapTable {
  std::vector<GapReport> cells;
  std::vector<SummaryRow> summary;
};
GapTable read_gap_table(const std::string& path);

/// Writes out/<scenario>/<method>/pf.._cd.._cv...csv and out/<scenario>/table.csv.
void write_results(const std::string& out_dir, const std::string& scenario_label,
                   const std::vector<GapReport>& reports);

enum class Factor { Pf, COverD, Cv };
Factor parse_factor(const std::string& name);  // "pf", "cd", "cv"

struct ThetaSlice {
  std::string label;  // e.g. "pf=1.25"
  double pf = 0, c_over_d = 0, cv = 0;
  ThetaCurve curve;
};

/// One theta curve per value of `vary`, other factors fixed. Exact evaluation
/// when tractable, simulation otherwise.
std::vector<ThetaSlice> run_theta_curves(const ExperimentPlan& plan, Factor vary,
                                         const std::vector<double>& values, double pf,
                                         double c_over_d, double cv);

void write_theta_curves(const std::string& path, const std::vector<ThetaSlice>& slices);

struct ToyCell {
  double pf = 1.0, c_over_d = 0.8, cv = 0.2;
  std::optional<double> wvs_theta;  // overrides PropertyOptions::wvs_theta
};

struct PropertyOptions {
  std::vector<ToyCell> cells;
  std::vector<Method> simulated_methods = {Method::Opt, Method::Ce, Method::Pq,
                                           Method::Aq,  Method::Wv, Method::Wvs};
  int replications = 50'000;
  std::uint64_t seed = 20240607;
  double wvs_theta = 0.04;  // theta used for the WVS simulation check
  bool refinement = true;   // 50x50 -> 100x100 -> 200x200 on the first cell
  // Applied to the finest grid before the refinement check; for detector tests.
  std::function<void(ValueGrid&)> grid_fault;
};

struct PropertyCheck {
  // "structure", "bounds", "residual", "simulation", "refinement"
  std::string category;
  std::string name;
  bool passed = true;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  std::vector<std::string> warnings;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Every hard invariant on each selected toy cell. An empty selection passes
/// vacuously with a warning.
PropertyReport run_property_suite(const PropertyOptions& options);

/// The 36-cell factor grid.
std::vector<ToyCell> full_toy_grid();

std::string format_double(double value);  // %.17g

}  // namespace cargo
