#include "cargo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cargo/errors.hpp"
#include "cargo/price_root.hpp"

namespace cargo {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string cell_tag(double pf, double cd, double cv) {
  return "pf=" + short_double(pf) + " cd=" + short_double(cd) + " cv=" + short_double(cv);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw FormatError("gap table: bad " + what + " '" + s + "'");
  return v;
}

constexpr const char* kGapHeader =
    "pf,c_over_d,cv,method,revenue,reference,reference_kind,gap_pct,theta_star,se,error";

ScenarioSpec cell_spec(const ExperimentPlan& plan, double pf, double cd, double cv) {
  return resolve_scenario(plan.scenario, ScenarioFactors{pf, cd, cv});
}

GapOptions gap_options(const ExperimentPlan& plan, const Scenario& sc) {
  GapOptions o{std::nullopt, plan.theta, plan.simulation};
  if (plan.grid_segments)
    o.grid = with_segments(default_grid_spec(sc), plan.grid_segments->first,
                           plan.grid_segments->second);
  return o;
}

}  // namespace

ExperimentPlan parse_plan(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("plan JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("plan JSON must be an object");
  ExperimentPlan plan;
  try {
    plan.scenario = doc.value("scenario", plan.scenario);
    plan.c_over_d = doc.value("c_over_d", plan.c_over_d);
    plan.pf = doc.value("pf", plan.pf);
    plan.cv = doc.value("cv", plan.cv);
    if (doc.contains("methods")) {
      plan.methods.clear();
      for (const auto& m : doc["methods"]) plan.methods.push_back(parse_method(m.get<std::string>()));
    }
    plan.simulation.replications = doc.value("replications", plan.simulation.replications);
    plan.simulation.seed = doc.value("seed", plan.simulation.seed);
    plan.simulation.antithetic = doc.value("antithetic", plan.simulation.antithetic);
    if (doc.contains("theta")) {
      const auto& t = doc["theta"];
      plan.theta.min = t.value("min", plan.theta.min);
      plan.theta.max = t.value("max", plan.theta.max);
      plan.theta.step = t.value("step", plan.theta.step);
    }
    plan.out_dir = doc.value("out", plan.out_dir);
    plan.force_upper_bound = doc.value("upper_bound", plan.force_upper_bound);
    if (doc.contains("grid")) plan.grid_segments = parse_grid_size(doc["grid"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan JSON: ") + e.what());
  }
  return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open plan file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_plan(buf.str());
}

std::pair<int, int> parse_grid_size(const std::string& text) {
  int a = 0, b = 0;
  char x = 0, extra = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || (x != 'x' && x != 'X') ||
      a < 1 || b < 1)
    throw ConfigError("grid size must look like 50x50, got '" + text + "'");
  return {a, b};
}

std::string scenario_label(const std::string& source) {
  return is_builtin_scenario(source) ? source : fs::path(source).stem().string();
}

std::string default_output_dir() {
  const char* env = std::getenv("CARGOPRICE_OUT");
  return env && *env ? env : "out";
}

bool exact_tractable(const Scenario& sc) {
  const auto states = StateIndex::count(sc.num_types(), sc.max_bookings());
  return static_cast<long double>(states) * (sc.periods() + 1) <=
         static_cast<long double>(kStateBudget);
}

std::vector<GapReport> run_grid(const ExperimentPlan& plan,
                                const std::function<void(const GapReport&)>& progress) {
  std::vector<GapReport> out;
  for (double cv : plan.cv)
    for (double pf : plan.pf)
      for (double cd : plan.c_over_d) {
        std::optional<Scenario> sc;
        std::string build_error;
        try {
          sc.emplace(cell_spec(plan, pf, cd, cv));
        } catch (const std::exception& e) {
          build_error = e.what();
        }
        std::optional<CellAnalysis> cell;
        bool exact = false;
        if (sc) {
          cell.emplace(*sc, gap_options(plan, *sc));
          exact = !plan.force_upper_bound && exact_tractable(*sc);
        }
        for (Method m : plan.methods) {
          GapReport r;
          r.pf = pf;
          r.c_over_d = cd;
          r.cv = cv;
          r.method = m;
          r.reference_kind = exact ? ReferenceKind::Optimum : ReferenceKind::UpperBound;
          if (!cell) {
            r.error = build_error;
          } else {
            try {
              r = exact ? cell->gap_exact(m) : cell->gap_upper_bound(m);
              r.pf = pf;
              r.c_over_d = cd;
              r.cv = cv;
            } catch (const std::exception& e) {
              r.error = e.what();
            }
          }
          if (progress) progress(r);
          out.push_back(std::move(r));
        }
      }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<GapReport>& reports) {
  std::vector<double> cvs;
  std::vector<Method> methods;
  for (const auto& r : reports) {
    if (std::find(cvs.begin(), cvs.end(), r.cv) == cvs.end()) cvs.push_back(r.cv);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  }
  std::vector<SummaryRow> out;
  for (double cv : cvs)
    for (Method m : methods) {
      std::vector<double> gaps;
      for (const auto& r : reports)
        if (r.cv == cv && r.method == m && r.error.empty()) gaps.push_back(r.gap_pct);
      if (gaps.empty()) continue;
      double sum = 0.0;
      for (double g : gaps) sum += g;
      out.push_back({"min", cv, m, *std::min_element(gaps.begin(), gaps.end())});
      out.push_back({"mean", cv, m, sum / gaps.size()});
      out.push_back({"max", cv, m, *std::max_element(gaps.begin(), gaps.end())});
    }
  return out;
}

void write_gap_table(const std::string& path, const std::vector<GapReport>& reports) {
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << kGapHeader << '\n';
  for (const auto& r : reports) {
    os << format_double(r.pf) << ',' << format_double(r.c_over_d) << ',' << format_double(r.cv)
       << ',' << method_name(r.method) << ',';
    if (r.error.empty()) {
      os << format_double(r.revenue) << ',' << format_double(r.reference) << ','
         << reference_name(r.reference_kind) << ',' << format_double(r.gap_pct) << ','
         << (r.theta_star ? format_double(*r.theta_star) : "") << ','
         << (r.standard_error ? format_double(*r.standard_error) : "") << ",\n";
    } else {
      os << ",," << reference_name(r.reference_kind) << ",,,," << csv_quote(r.error) << '\n';
    }
  }
  for (const auto& s : summarize(reports))
    os << s.stat << ",," << format_double(s.cv) << ',' << method_name(s.method) << ",,,,"
       << format_double(s.gap_pct) << ",,,\n";
}

GapTable read_gap_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != kGapHeader)
    throw FormatError(path + ": unexpected gap table header");
  GapTable t;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != 11) throw FormatError(path + ": expected 11 fields in '" + line + "'");
    if (f[0] == "min" || f[0] == "mean" || f[0] == "max") {
      t.summary.push_back(
          {f[0], parse_number(f[2], "cv"), parse_method(f[3]), parse_number(f[7], "gap_pct")});
      continue;
    }
    GapReport r;
    r.pf = parse_number(f[0], "pf");
    r.c_over_d = parse_number(f[1], "c_over_d");
    r.cv = parse_number(f[2], "cv");
    r.method = parse_method(f[3]);
    r.reference_kind = f[6] == "optimum" ? ReferenceKind::Optimum : ReferenceKind::UpperBound;
    r.error = f[10];
    if (r.error.empty()) {
      r.revenue = parse_number(f[4], "revenue");
      r.reference = parse_number(f[5], "reference");
      r.gap_pct = parse_number(f[7], "gap_pct");
      if (!f[8].empty()) r.theta_star = parse_number(f[8], "theta_star");
      if (!f[9].empty()) r.standard_error = parse_number(f[9], "se");
    }
    t.cells.push_back(std::move(r));
  }
  return t;
}

void write_results(const std::string& out_dir, const std::string& label,
                   const std::vector<GapReport>& reports) {
  const fs::path root = fs::path(out_dir) / label;
  for (const auto& r : reports) {
    const auto name = "pf" + short_double(r.pf) + "_cd" + short_double(r.c_over_d) + "_cv" +
                      short_double(r.cv) + ".csv";
    write_gap_table((root / method_name(r.method) / name).string(), {r});
  }
  write_gap_table((root / "table.csv").string(), reports);
}

Factor parse_factor(const std::string& name) {
  if (name == "pf") return Factor::Pf;
  if (name == "cd" || name == "c_over_d") return Factor::COverD;
  if (name == "cv") return Factor::Cv;
  throw ConfigError("unknown factor '" + name + "' (expected pf, cd or cv)");
}

std::vector<ThetaSlice> run_theta_curves(const ExperimentPlan& plan, Factor vary,
                                         const std::vector<double>& values, double pf,
                                         double cd, double cv) {
  std::vector<ThetaSlice> out;
  for (double v : values) {
    ThetaSlice s{"", pf, cd, cv, {}};
    switch (vary) {
      case Factor::Pf: s.pf = v; s.label = "pf=" + short_double(v); break;
      case Factor::COverD: s.c_over_d = v; s.label = "cd=" + short_double(v); break;
      case Factor::Cv: s.cv = v; s.label = "cv=" + short_double(v); break;
    }
    const Scenario sc(cell_spec(plan, s.pf, s.c_over_d, s.cv));
    CellAnalysis cell(sc, gap_options(plan, sc));
    if (!plan.force_upper_bound && exact_tractable(sc)) {
      s.curve = theta_search(plan.theta,
                             [&](double th) { return cell.exact_revenue(Method::Wvs, th); });
    } else {
      s.curve = theta_search(plan.theta, [&](double th) {
        return simulate(sc, *cell.policy(Method::Wvs, th), plan.simulation).mean;
      });
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_theta_curves(const std::string& path, const std::vector<ThetaSlice>& slices) {
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "slice_label,theta,revenue,improvement_pct\n";
  for (const auto& s : slices)
    for (const auto& p : s.curve.points)
      os << s.label << ',' << format_double(p.theta) << ',' << format_double(p.revenue) << ','
         << format_double(p.improvement_pct) << '\n';
}

std::vector<ToyCell> full_toy_grid() {
  std::vector<ToyCell> out;
  for (double cv : {0.2, 0.3, 0.5})
    for (double pf : {1.0, 1.25, 1.5})
      for (double cd : {0.8, 0.9, 1.0, 1.1}) out.push_back({pf, cd, cv, std::nullopt});
  return out;
}

PropertyReport run_property_suite(const PropertyOptions& opt) {
  PropertyReport rep;
  if (opt.cells.empty()) {
    rep.warnings.push_back("empty selection: no properties checked");
    return rep;
  }
  auto add = [&](std::string category, std::string name, bool ok, std::string detail = {}) {
    rep.checks.push_back({std::move(category), std::move(name), ok, std::move(detail)});
  };
  std::vector<GapReport> gaps;

  for (std::size_t k = 0; k < opt.cells.size(); ++k) {
    const auto& c = opt.cells[k];
    const std::string tag = "[" + cell_tag(c.pf, c.c_over_d, c.cv) + "] ";
    const Scenario sc = build_toy_scenario(c.pf, c.c_over_d, c.cv);
    CellAnalysis cell(sc, {});
    const auto& optimal = cell.optimal();
    const auto& ce = cell.certainty_equivalent();
    const double V = optimal.values.initial();
    const double Vbar = ce.values.initial();
    const double slack = 1e-9 * std::max(1.0, std::abs(Vbar));

    const auto pq_structure = check_pq_structure(cell.pq(), sc);
    {
      std::string detail = std::to_string(pq_structure.violations.size()) + " violations";
      if (!pq_structure.ok()) {
        const auto& v = pq_structure.violations.front();
        detail += "; first " + v.property + " at t=" + std::to_string(v.period) +
                  " x=" + std::to_string(v.total) + " by " + format_double(v.magnitude);
      }
      add("structure", tag + "PQ concavity and monotonicity", pq_structure.ok(), detail);
    }
    {
      const Scenario hom(time_homogeneous_variant(sc.spec()));
      const auto r = check_pq_structure(solve_pq(hom), hom);
      add("structure", tag + "PQ prices non-increasing in time (time-homogeneous variant)",
          r.ok() && r.checked_price_time, std::to_string(r.violations.size()) + " violations");
    }
    for (const auto* sol : {&optimal, &ce}) {
      const auto mono = check_monotonicity(sol->values);
      const std::string which = sol == &optimal ? "optimal" : "CE";
      add("structure", tag + which + " values non-increasing in t and in x",
          mono.holds(slack),
          "worst time " + format_double(mono.worst_time) + ", worst count " +
              format_double(mono.worst_count));
      const double res = max_price_residual(sc, *sol);
      add("residual", tag + which + " price fixed-point residuals", res <= kPriceTolerance,
          "max relative residual " + format_double(res));
    }

    for (const auto* q : {&cell.pq(), &cell.aq()}) {
      const double res = max_price_residual(sc, *q);
      add("residual", tag + (q->kind == QuantityKind::Primal ? "PQ" : "AQ") +
                          " price fixed-point residuals",
          res <= kPriceTolerance, "max relative residual " + format_double(res));
    }

    const double J_ce = evaluate_policy(sc, *ce.policy, cell.index()).initial();
    add("bounds", tag + "J_CE <= V <= V_CE", J_ce <= V + slack && V <= Vbar + slack,
        format_double(J_ce) + " <= " + format_double(V) + " <= " + format_double(Vbar));
    const double bound = ce_gap_bound(sc);
    add("bounds", tag + "V_CE - J_CE within the CE gap bound", Vbar - J_ce <= bound + slack,
        format_double(Vbar - J_ce) + " <= " + format_double(bound));

    std::map<Method, double> exact;
    const double theta = c.wvs_theta.value_or(opt.wvs_theta);
    for (Method m : {Method::Opt, Method::Ce, Method::Pq, Method::Aq, Method::Wv, Method::Wvs}) {
      exact[m] = m == Method::Ce ? J_ce : cell.exact_revenue(m, theta);
      if (m == Method::Opt || m == Method::Ce) continue;
      GapReport g;
      g.pf = c.pf;
      g.c_over_d = c.c_over_d;
      g.cv = c.cv;
      g.method = m;
      g.reference = V;
      g.revenue = exact[m];
      g.gap_pct = gap_percent(V, exact[m]);
      gaps.push_back(g);
      add("bounds", tag + method_name(m) + " does not beat the optimum", g.gap_pct >= -1e-6,
          "gap " + format_double(g.gap_pct) + "%");
    }

    SimulationConfig sim;
    sim.replications = opt.replications;
    sim.seed = opt.seed;
    for (Method m : opt.simulated_methods) {
      const auto r = simulate(sc, *cell.policy(m, theta), sim);
      const double z = r.standard_error > 0 ? std::abs(r.mean - exact[m]) / r.standard_error
                                            : (r.mean == exact[m] ? 0.0 : INFINITY);
      add("simulation", tag + method_name(m) + " simulated mean within 4 SE of exact value",
          z <= 4.0,
          "sim " + format_double(r.mean) + " +- " + format_double(r.standard_error) + ", exact " +
              format_double(exact[m]) + ", z=" + short_double(z));
    }

    if (k == 0) {
      SimulationConfig small;
      small.replications = 2000;
      small.seed = opt.seed;
      const auto pq = cell.policy(Method::Pq);
      const auto a = simulate(sc, *pq, small), b = simulate(sc, *pq, small);
      add("simulation", tag + "simulation is bit-reproducible", a.digest == b.digest);
      const auto raised = simulate(sc, ShiftedPolicy(pq, 0.05 * sc.price_scale(0, 0)), small);
      int violations = 0;
      for (int r = 0; r < small.replications; ++r)
        violations += raised.acceptances[r] > a.acceptances[r];
      add("simulation", tag + "raising prices never increases acceptances", violations == 0,
          std::to_string(violations) + " replications violate");
    }

    if (k == 0 && opt.refinement) {
      const GridSpec base = default_grid_spec(sc);
      double err[3];
      for (int f = 0; f < 3; ++f) {
        ValueGrid g = solve_wv_grid(sc, refine(base, 1 << f));
        if (f == 2 && opt.grid_fault) opt.grid_fault(g);
        err[f] = std::abs(g.initial() - Vbar);
      }
      add("refinement", tag + "grid error shrinks 50x50 -> 100x100 -> 200x200",
          err[1] <= err[0] + 1e-6 && err[2] <= err[1] + 1e-6,
          format_double(err[0]) + ", " + format_double(err[1]) + ", " + format_double(err[2]));
      add("refinement", tag + "200x200 error at most half the 50x50 error",
          err[2] <= 0.5 * err[0],
          format_double(err[2]) + " vs " + format_double(err[0]));
    }
  }
  rep.warnings = soft_warnings(gaps);
  return rep;
}

}  // namespace cargo
