#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cargo/binary_io.hpp"
#include "cargo/errors.hpp"
#include "cargo/harness.hpp"
#include "cargo/scenario_io.hpp"

using namespace cargo;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cargoprice_unit";
  fs::create_directories(dir);
  return dir / name;
}

const char* kToyJson = R"({
  "name": "toy-copy",
  "L": 75, "periods": 225, "gamma": 6000,
  "units": {"weight": 1, "volume": 10000},
  "capacity": {"mode": "ratio", "c_over_d": 0.8},
  "penalty": {"pf": 1.0},
  "types": [
    {"label": "a", "weight_mean": 100, "volume_mean": 60, "cv": 0.2,
     "arrival": [[0, 0.04], [50, 0.12], [75, 0.08]],
     "price": {"scale": [[0, 4], [75, 6]], "shape": 5}},
    {"label": "b", "weight_mean": 75, "volume_mean": 50, "cv": 0.2,
     "arrival": [[0, 0.025], [50, 0.075], [75, 0.05]],
     "price": {"scale": [[0, 3], [75, 4.5]], "shape": 5}},
    {"label": "c", "weight_mean": 150, "volume_mean": 75, "cv": 0.2,
     "arrival": [[0, 0.03], [50, 0.09], [75, 0.06]],
     "price": {"scale": [[0, 3], [75, 4.5]], "shape": 5}}
  ]
})";

}  // namespace

TEST_CASE("scenario documents") {
  const Scenario parsed(parse_scenario(kToyJson));
  CHECK(parsed.name() == "toy-copy");
  CHECK(parsed.digest() == build_toy_scenario(1, 0.8, 0.2).digest());

  CHECK_THROWS_AS(parse_scenario("{"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"L": 10, "periods": 10})"), ConfigError);
  std::string bad = kToyJson;
  bad.replace(bad.find("\"ratio\""), 7, "\"loose\"");
  CHECK_THROWS_AS(parse_scenario(bad), ConfigError);
  try {
    std::string missing = kToyJson;
    missing.replace(missing.find("\"shape\": 5}}\n  ]"), 10, "\"shap\": 5");
    parse_scenario(missing);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("shape") != std::string::npos);
  }

  const auto path = scratch("toy.json");
  std::ofstream(path) << kToyJson;
  const auto resolved = resolve_scenario(path.string(), {1.5, 1.1, 0.5});
  CHECK(resolved.penalty_factor == 1.5);
  CHECK(resolved.capacity.c_over_d == 1.1);
  CHECK(resolved.types[2].volume_sd == Approx(0.5 * 75e4));
  CHECK(Scenario(resolved).digest() == build_toy_scenario(1.5, 1.1, 0.5).digest());
  CHECK(is_builtin_scenario("real-m27"));
  CHECK_FALSE(is_builtin_scenario(path.string()));
  CHECK(scenario_label(path.string()) == "toy");
  CHECK_THROWS_AS(resolve_scenario("toy-m4", {}), ConfigError);
}

TEST_CASE("binary dumps") {
  const auto sc = build_toy_scenario(1, 0.8, 0.2);
  const auto other = build_toy_scenario(1.25, 0.8, 0.2);

  const auto pq = solve_pq(sc);
  const auto qpath = scratch("pq.bin").string();
  write_dump(qpath, sc, pq);
  CHECK(peek_dump_kind(qpath) == DumpKind::Quantity);
  const auto back = read_quantity_dump(qpath, sc);
  CHECK(back.values == pq.values);
  CHECK(back.prices == pq.prices);
  CHECK_THROWS_AS(read_quantity_dump(qpath, other), FormatError);
  CHECK_THROWS_AS(read_exact_dump(qpath, sc), FormatError);

  const auto grid = solve_wv_grid(sc, with_segments(default_grid_spec(sc), 20, 20));
  const auto gpath = scratch("grid.bin").string();
  write_dump(gpath, sc, grid, 0.07);
  const auto [g2, theta] = read_grid_dump(gpath, sc);
  CHECK(theta == 0.07);
  for (int t = 0; t <= grid.periods(); t += 45) CHECK(g2.slice(t) == grid.slice(t));

  const auto ce = solve_ce(sc);
  const auto epath = scratch("ce.bin").string();
  write_dump(epath, sc, ce);
  const auto e2 = read_exact_dump(epath, sc);
  CHECK(e2.values.values == ce.values.values);
  const auto policy = read_policy_dump(epath, sc);
  const int x[3] = {1, 2, 0};
  CHECK(policy->price(17, x, 1) == ce.policy->price(17, x, 1));

  fs::resize_file(epath, fs::file_size(epath) - 8);
  CHECK_THROWS_AS(read_exact_dump(epath, sc), FormatError);
  const auto junk = scratch("junk.bin").string();
  std::ofstream(junk) << "not a dump at all, just text";
  CHECK_THROWS_AS(peek_dump_kind(junk), FormatError);
}

TEST_CASE("gap helpers") {
  CHECK(gap_percent(200, 190) == Approx(5.0));
  CHECK_THROWS_AS(gap_percent(0, 1), NumericalError);
  CHECK(parse_method("WvS") == Method::Wvs);
  CHECK(method_name(Method::Ce) == "ce");
  CHECK_THROWS_AS(parse_method("xyz"), ConfigError);
  CHECK(parse_grid_size("120x80") == std::pair{120, 80});
  CHECK_THROWS_AS(parse_grid_size("120"), ConfigError);
  CHECK(parse_factor("cd") == Factor::COverD);
}

TEST_CASE("gap table round trip") {
  std::vector<GapReport> rows;
  for (double cv : {0.2, 0.5})
    for (double pf : {1.0, 1.5}) {
      GapReport r;
      r.pf = pf;
      r.c_over_d = 0.9;
      r.cv = cv;
      r.method = Method::Wvs;
      r.revenue = 1000.0 / 3 * pf;
      r.reference = 400 * pf;
      r.gap_pct = gap_percent(r.reference, r.revenue) + cv;
      r.theta_star = 0.1 * cv;
      if (pf > 1) r.standard_error = 1.25;
      rows.push_back(r);
    }
  rows[1].error = "solver failed, badly";
  const auto path = scratch("table.csv").string();
  write_gap_table(path, rows);
  const auto table = read_gap_table(path);
  REQUIRE(table.cells.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(table.cells[k].error == rows[k].error);
    // Failed cells keep only their coordinates and the message.
    if (!rows[k].error.empty()) continue;
    CHECK(table.cells[k].revenue == rows[k].revenue);
    CHECK(table.cells[k].gap_pct == rows[k].gap_pct);
    CHECK(table.cells[k].theta_star == rows[k].theta_star);
    CHECK(table.cells[k].standard_error.has_value() == rows[k].standard_error.has_value());
  }
  const auto summary = summarize(rows);
  REQUIRE(table.summary.size() == summary.size());
  for (std::size_t k = 0; k < summary.size(); ++k) {
    CHECK(table.summary[k].stat == summary[k].stat);
    CHECK(table.summary[k].gap_pct == summary[k].gap_pct);
  }
  CHECK(summary.front().stat == "min");
}

TEST_CASE("experiment plans") {
  const auto plan = parse_plan(R"({"scenario": "real-m27", "pf": [1.25], "methods": ["pq", "wv"],
                                   "grid": "80x40", "replications": 3000, "antithetic": true,
                                   "theta": {"min": 0, "max": 0.1, "step": 0.02}})");
  CHECK(plan.scenario == "real-m27");
  CHECK(plan.pf == std::vector<double>{1.25});
  CHECK(plan.c_over_d.size() == 4);
  CHECK(plan.methods == std::vector<Method>{Method::Pq, Method::Wv});
  CHECK(plan.grid_segments == std::pair{80, 40});
  CHECK(plan.simulation.replications == 3000);
  CHECK(plan.simulation.antithetic);
  CHECK(plan.theta.values().size() == 6);
  CHECK_THROWS_AS(parse_plan(R"({"pf": "high"})"), ConfigError);
  CHECK(full_toy_grid().size() == 36);
}

TEST_CASE("small exact grid run") {
  ExperimentPlan plan;
  plan.c_over_d = {1.0};
  plan.pf = {1.0};
  plan.cv = {0.2};
  plan.methods = {Method::Pq, Method::Aq};
  const auto rows = run_grid(plan);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].reference_kind == ReferenceKind::Optimum);
  CHECK(rows[0].gap_pct == Approx(0.56).epsilon(0.05));
  CHECK(rows[1].gap_pct < rows[0].gap_pct);
}

TEST_CASE("property suite") {
  PropertyOptions none;
  const auto empty = run_property_suite(none);
  CHECK(empty.passed());
  CHECK_FALSE(empty.warnings.empty());

  PropertyOptions faulty;
  faulty.cells = {ToyCell{}};
  faulty.simulated_methods.clear();
  faulty.grid_fault = [](ValueGrid& g) { g.slice(0)(0, 0) += 25.0; };
  const auto rep = run_property_suite(faulty);
  CHECK_FALSE(rep.passed());
  bool refinement_failed = false, others_ok = true;
  for (const auto& c : rep.checks) {
    if (c.category == "refinement" && !c.passed) refinement_failed = true;
    if (c.category != "refinement" && !c.passed) others_ok = false;
  }
  CHECK(refinement_failed);
  CHECK(others_ok);
}
