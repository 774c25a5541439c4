#pragma once

// Gap metrics tying the solvers together: each approximate policy's revenue
// against the exact optimum (small m) or against the grid upper bound.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cargo/domain.hpp"
#include "cargo/exact_mdp.hpp"
#include "cargo/quantity_mdp.hpp"
#include "cargo/simulator.hpp"
#include "cargo/wv_grid.hpp"

namespace cargo {

enum class Method { Opt, Ce, Pq, Aq, Wv, Wvs };

std::string method_name(Method method);  // "opt", "ce", ...
Method parse_method(const std::string& name);  // case-insensitive; throws ConfigError

enum class ReferenceKind { Optimum, UpperBound };
std::string reference_name(ReferenceKind kind);

struct GapReport {
  double pf = 0, c_over_d = 0, cv = 0;
  Method method = Method::Opt;
  double revenue = 0;
  double reference = 0;
  ReferenceKind reference_kind = ReferenceKind::Optimum;
  double gap_pct = 0;
  std::optional<double> theta_star;
  std::optional<double> standard_error;
  std::optional<ThetaCurve> curve;  // WVS only
  std::string error;                // non-empty when the cell failed
};

/// (reference - revenue) / reference * 100; throws NumericalError when reference is 0.
double gap_percent(double reference, double revenue);

struct GapOptions {
  std::optional<GridSpec> grid;  // default_grid_spec when unset
  ThetaRange theta;
  SimulationConfig simulation;
};

/// Caches the expensive per-scenario pieces (optimal table, value grid) so all
/// methods of one experiment cell share them.
class CellAnalysis {
 public:
  CellAnalysis(const Scenario& scenario, GapOptions options);

  const Scenario& scenario() const { return scenario_; }

  const ExactSolution& optimal();
  const ExactSolution& certainty_equivalent();
  const QValueTable& pq();
  const QValueTable& aq();
  std::shared_ptr<const ValueGrid> grid();
  std::shared_ptr<const StateIndex> index();

  /// theta is ignored except for WVS.
  std::shared_ptr<const PricingPolicy> policy(Method method, double theta = 0.0);

  /// Exact J_0(0) of the method's policy.
  double exact_revenue(Method method, double theta = 0.0);

  GapReport gap_exact(Method method);
  GapReport gap_upper_bound(Method method);

 private:
  GapReport blank(Method method) const;

  const Scenario& scenario_;
  GapOptions options_;
  std::optional<ExactSolution> optimal_, ce_;
  std::shared_ptr<const QValueTable> pq_shared_, aq_shared_;
  std::shared_ptr<const ValueGrid> grid_;
  std::shared_ptr<const StateIndex> index_;
};

GapReport gap_exact(const Scenario& scenario, Method method, const GapOptions& options = {});
GapReport gap_upper_bound(const Scenario& scenario, Method method, const GapOptions& options);

/// Empirical regularities that are reported, never enforced.
std::vector<std::string> soft_warnings(const std::vector<GapReport>& reports);

}  // namespace cargo
