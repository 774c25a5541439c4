#pragma once

// Backward induction over the full count-vector state space: the general model
// with stochastic terminal penalty, the certainty-equivalent (CE) model, and
// exact policy evaluation on the general model.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "cargo/domain.hpp"
#include "cargo/policy.hpp"
#include "cargo/state_index.hpp"

namespace cargo {

/// V_t(x) for t = 0..T, stored as a (states x (T + 1)) column-major matrix.
struct ValueTable {
  std::shared_ptr<const StateIndex> index;
  Eigen::MatrixXd values;

  double at(int period, std::int64_t state) const { return values(state, period); }
  /// V_0(0).
  double initial() const { return values(0, 0); }
  int periods() const { return static_cast<int>(values.cols()) - 1; }
};

struct ExactSolution {
  ValueTable values;
  std::shared_ptr<const ExactPolicy> policy;
};

enum class TerminalModel {
  Stochastic,  // E of the penalty on normal sums
  Expected,    // penalty of expected totals (CE)
};

/// Largest state-period count solve_general / solve_ce will attempt.
inline constexpr std::int64_t kStateBudget = 100'000'000;

/// Shared state index for the scenario; throws CapacityError over budget.
std::shared_ptr<const StateIndex> make_state_index(const Scenario& scenario);

/// Terminal value V_T(x) under the chosen model.
double terminal_value(const Scenario& scenario, std::span<const int> counts, TerminalModel model);

ExactSolution solve_general(const Scenario& scenario);
ExactSolution solve_ce(const Scenario& scenario);
ExactSolution solve_exact(const Scenario& scenario, TerminalModel model,
                          std::shared_ptr<const StateIndex> index = nullptr);

/// J_t^pi(x) on the general model. Types at the x_max limit are never sold.
ValueTable evaluate_policy(const Scenario& scenario, const PricingPolicy& policy,
                           std::shared_ptr<const StateIndex> index = nullptr);

/// Faster path for a policy already tabulated on the same index.
ValueTable evaluate_policy(const Scenario& scenario, const TabulatedPolicy& policy);

/// max over |x|_1 <= x_max of the CE-gap bound M(x) for linear penalties.
double ce_gap_bound(const Scenario& scenario);
double ce_gap_term(const Scenario& scenario, std::span<const int> counts);

struct MonotonicityReport {
  double worst_time = 0;   // max over x, t of V_{t+1}(x) - V_t(x)
  double worst_count = 0;  // max over x, i, t of V_t(x + e_i) - V_t(x)
  bool holds(double slack = 0) const { return worst_time <= slack && worst_count <= slack; }
};
MonotonicityReport check_monotonicity(const ValueTable& table);

/// max over stored prices of |fixed-point residual| / max(1, r).
double max_price_residual(const Scenario& scenario, const ExactSolution& solution);

}  // namespace cargo
