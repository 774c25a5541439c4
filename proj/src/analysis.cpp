#include "cargo/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "cargo/errors.hpp"

namespace cargo {

std::string method_name(Method m) {
  switch (m) {
    case Method::Opt: return "opt";
    case Method::Ce: return "ce";
    case Method::Pq: return "pq";
    case Method::Aq: return "aq";
    case Method::Wv: return "wv";
    case Method::Wvs: return "wvs";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Method m : {Method::Opt, Method::Ce, Method::Pq, Method::Aq, Method::Wv, Method::Wvs})
    if (method_name(m) == s) return m;
  throw ConfigError("unknown method '" + name + "' (expected opt, ce, pq, aq, wv or wvs)");
}

std::string reference_name(ReferenceKind k) {
  return k == ReferenceKind::Optimum ? "optimum" : "upper_bound";
}

double gap_percent(double reference, double revenue) {
  if (reference == 0.0) throw NumericalError("gap undefined: reference value is zero");
  return (reference - revenue) / reference * 100.0;
}

CellAnalysis::CellAnalysis(const Scenario& scenario, GapOptions options)
    : scenario_(scenario), options_(std::move(options)) {}

std::shared_ptr<const StateIndex> CellAnalysis::index() {
  if (!index_) index_ = make_state_index(scenario_);
  return index_;
}

const ExactSolution& CellAnalysis::optimal() {
  if (!optimal_) optimal_ = solve_exact(scenario_, TerminalModel::Stochastic, index());
  return *optimal_;
}

const ExactSolution& CellAnalysis::certainty_equivalent() {
  if (!ce_) ce_ = solve_exact(scenario_, TerminalModel::Expected, index());
  return *ce_;
}

const QValueTable& CellAnalysis::pq() {
  if (!pq_shared_) pq_shared_ = std::make_shared<const QValueTable>(solve_pq(scenario_));
  return *pq_shared_;
}

const QValueTable& CellAnalysis::aq() {
  if (!aq_shared_) aq_shared_ = std::make_shared<const QValueTable>(solve_aq(scenario_));
  return *aq_shared_;
}

std::shared_ptr<const ValueGrid> CellAnalysis::grid() {
  if (!grid_)
    grid_ = std::make_shared<const ValueGrid>(
        solve_wv_grid(scenario_, options_.grid.value_or(default_grid_spec(scenario_))));
  return grid_;
}

std::shared_ptr<const PricingPolicy> CellAnalysis::policy(Method m, double theta) {
  switch (m) {
    case Method::Opt: return optimal().policy;
    case Method::Ce: return certainty_equivalent().policy;
    case Method::Pq:
      pq();
      return std::make_shared<QuantityPolicy>(pq_shared_);
    case Method::Aq:
      aq();
      return std::make_shared<QuantityPolicy>(aq_shared_);
    case Method::Wv: return std::make_shared<WvPolicy>(grid(), scenario_, 0.0);
    case Method::Wvs: return std::make_shared<WvPolicy>(grid(), scenario_, theta);
  }
  throw ConfigError("unknown method");
}

double CellAnalysis::exact_revenue(Method m, double theta) {
  if (m == Method::Opt) return optimal().values.initial();
  return evaluate_policy(scenario_, *policy(m, theta), index()).initial();
}

GapReport CellAnalysis::blank(Method m) const {
  GapReport r;
  const auto& spec = scenario_.spec();
  r.pf = spec.penalty_factor;
  r.c_over_d = spec.capacity.mode == CapacitySpec::Mode::Ratio
                   ? spec.capacity.c_over_d
                   : scenario_.capacity_weight() / scenario_.demand_weight();
  r.cv = scenario_.num_types() ? scenario_.type(0).weight_sd / scenario_.type(0).weight_mean : 0;
  r.method = m;
  return r;
}

GapReport CellAnalysis::gap_exact(Method m) {
  GapReport r = blank(m);
  r.reference_kind = ReferenceKind::Optimum;
  r.reference = optimal().values.initial();
  if (m == Method::Wvs) {
    auto curve = theta_search(options_.theta,
                              [&](double th) { return exact_revenue(Method::Wvs, th); });
    r.revenue = curve.best_revenue;
    r.theta_star = curve.best_theta;
    r.curve = std::move(curve);
  } else {
    r.revenue = exact_revenue(m);
  }
  r.gap_pct = gap_percent(r.reference, r.revenue);
  return r;
}

GapReport CellAnalysis::gap_upper_bound(Method m) {
  GapReport r = blank(m);
  r.reference_kind = ReferenceKind::UpperBound;
  r.reference = grid()->initial();
  if (m == Method::Wvs) {
    // Every theta shares the seed, so the comparison runs on common random numbers.
    std::map<double, SimulationReport> runs;
    auto curve = theta_search(options_.theta, [&](double th) {
      auto rep = simulate(scenario_, *policy(Method::Wvs, th), options_.simulation);
      const double mean = rep.mean;
      runs.emplace(th, std::move(rep));
      return mean;
    });
    r.revenue = curve.best_revenue;
    r.theta_star = curve.best_theta;
    r.standard_error = runs.at(curve.best_theta).standard_error;
    r.curve = std::move(curve);
  } else {
    const auto rep = simulate(scenario_, *policy(m), options_.simulation);
    r.revenue = rep.mean;
    r.standard_error = rep.standard_error;
  }
  r.gap_pct = gap_percent(r.reference, r.revenue);
  return r;
}

GapReport gap_exact(const Scenario& sc, Method m, const GapOptions& opts) {
  return CellAnalysis(sc, opts).gap_exact(m);
}

GapReport gap_upper_bound(const Scenario& sc, Method m, const GapOptions& opts) {
  return CellAnalysis(sc, opts).gap_upper_bound(m);
}

std::vector<std::string> soft_warnings(const std::vector<GapReport>& reports) {
  std::vector<std::string> out;
  std::map<std::tuple<double, double, double>, std::map<Method, double>> cells;
  for (const auto& r : reports)
    if (r.error.empty()) cells[{r.pf, r.c_over_d, r.cv}][r.method] = r.gap_pct;
  for (const auto& [key, gaps] : cells) {
    const auto pq = gaps.find(Method::Pq), aq = gaps.find(Method::Aq);
    if (pq != gaps.end() && aq != gaps.end() && aq->second > pq->second + 0.05) {
      std::ostringstream os;
      os << "AQ gap " << aq->second << "% exceeds PQ gap " << pq->second << "% at pf="
         << std::get<0>(key) << " C/D=" << std::get<1>(key) << " cv=" << std::get<2>(key);
      out.push_back(os.str());
    }
  }
  for (const auto& r : reports)
    if (r.error.empty() && r.reference_kind == ReferenceKind::Optimum && r.gap_pct < -1e-6) {
      std::ostringstream os;
      os << method_name(r.method) << " beats the optimum by " << -r.gap_pct << "% at pf=" << r.pf
         << " C/D=" << r.c_over_d << " cv=" << r.cv;
      out.push_back(os.str());
    }
  return out;
}

}  // namespace cargo
