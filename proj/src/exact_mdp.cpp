#include "cargo/exact_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cargo/errors.hpp"
#include "cargo/normal.hpp"
#include "cargo/parallel.hpp"
#include "cargo/price_root.hpp"

namespace cargo {

namespace {

struct Totals {
  double weight_mean = 0, weight_var = 0, volume_mean = 0, volume_var = 0;
};

Totals totals(const Scenario& sc, std::span<const int> x) {
  Totals out;
  for (int i = 0; i < sc.num_types(); ++i) {
    const auto& t = sc.type(i);
    out.weight_mean += x[i] * t.weight_mean;
    out.weight_var += x[i] * t.weight_sd * t.weight_sd;
    out.volume_mean += x[i] * t.volume_mean;
    out.volume_var += x[i] * t.volume_sd * t.volume_sd;
  }
  return out;
}

PricingProblem problem_for(const Scenario& sc, int t, int i, double opportunity_cost) {
  return {sc.price_scale(t, i), sc.price_shape(i), opportunity_cost, sc.chargeable(i),
          sc.arrival_mass(t, i)};
}

Eigen::MatrixXd allocate_values(const Scenario& sc, const StateIndex& index,
                                TerminalModel model) {
  Eigen::MatrixXd values(index.size(), sc.periods() + 1);
  const int T = sc.periods();
  parallel_for(index.size(), [&](std::int64_t s) {
    values(s, T) = terminal_value(sc, index.counts(s), model);
  });
  return values;
}

std::string describe_state(std::span<const int> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
  os << ")";
  return os.str();
}

}  // namespace

std::shared_ptr<const StateIndex> make_state_index(const Scenario& sc) {
  const auto states = StateIndex::count(sc.num_types(), sc.max_bookings());
  const long double pairs = static_cast<long double>(states) * (sc.periods() + 1);
  if (pairs > static_cast<long double>(kStateBudget)) {
    std::ostringstream os;
    os << "exact solve needs " << static_cast<double>(pairs) << " state-period pairs (m="
       << sc.num_types() << ", x_max=" << sc.max_bookings() << ", T=" << sc.periods()
       << "), over the budget of " << kStateBudget
       << "; use an approximation method (pq, aq, wv, wvs)";
    throw CapacityError(os.str());
  }
  return std::make_shared<const StateIndex>(sc.num_types(), sc.max_bookings());
}

double terminal_value(const Scenario& sc, std::span<const int> x, TerminalModel model) {
  const Totals tot = totals(sc, x);
  if (model == TerminalModel::Expected)
    return -sc.terminal_penalty(tot.weight_mean, tot.volume_mean);
  const double excess_w = normal_partial_expectation(tot.weight_mean, std::sqrt(tot.weight_var),
                                                     sc.capacity_weight());
  const double excess_v = normal_partial_expectation(tot.volume_mean, std::sqrt(tot.volume_var),
                                                     sc.capacity_volume());
  return -sc.penalty_weight() * excess_w - sc.penalty_volume() * excess_v;
}

ExactSolution solve_exact(const Scenario& sc, TerminalModel model,
                          std::shared_ptr<const StateIndex> index) {
  if (!index) index = make_state_index(sc);
  const int m = sc.num_types();
  const int T = sc.periods();
  ValueTable table{index, allocate_values(sc, *index, model)};
  auto policy = std::make_shared<ExactPolicy>(index, T);
  auto& V = table.values;

  for (int t = T - 1; t >= 0; --t) {
    parallel_for(index->size(), [&](std::int64_t s) {
      const double base = V(s, t + 1);
      double gain = 0.0;
      if (!index->at_limit(s)) {
        for (int i = 0; i < m; ++i) {
          const double c = base - V(index->successor(s, i), t + 1);
          const auto sol = solve_price(problem_for(sc, t, i, c));
          policy->at(t, s, i) = sol.price;
          gain += sol.gain;
        }
      }
      V(s, t) = base + gain;
    });
  }
  return {std::move(table), std::move(policy)};
}

ExactSolution solve_general(const Scenario& sc) {
  return solve_exact(sc, TerminalModel::Stochastic);
}

ExactSolution solve_ce(const Scenario& sc) { return solve_exact(sc, TerminalModel::Expected); }

ValueTable evaluate_policy(const Scenario& sc, const TabulatedPolicy& policy) {
  const auto index = policy.shared_index();
  if (index->num_types() != sc.num_types() || index->max_total() != sc.max_bookings() ||
      policy.periods() != sc.periods())
    throw PolicyError("tabulated policy does not match the scenario's state space");
  const int m = sc.num_types();
  const int T = sc.periods();
  ValueTable table{index, allocate_values(sc, *index, TerminalModel::Stochastic)};
  auto& J = table.values;
  for (int t = T - 1; t >= 0; --t) {
    parallel_for(index->size(), [&](std::int64_t s) {
      const double base = J(s, t + 1);
      double gain = 0.0;
      if (!index->at_limit(s)) {
        for (int i = 0; i < m; ++i) {
          const double r = policy.at(t, s, i);
          if (std::isnan(r)) {
            std::ostringstream os;
            os << "policy has no price at period " << t << ", state "
               << describe_state(index->counts(s)) << ", type " << i;
            throw PolicyError(os.str());
          }
          const double c = base - J(index->successor(s, i), t + 1);
          gain += expected_gain(problem_for(sc, t, i, c), r);
        }
      }
      J(s, t) = base + gain;
    });
  }
  return table;
}

ValueTable evaluate_policy(const Scenario& sc, const PricingPolicy& policy,
                           std::shared_ptr<const StateIndex> index) {
  if (!index) index = make_state_index(sc);
  if (const auto* tab = dynamic_cast<const TabulatedPolicy*>(&policy);
      tab && tab->index().num_types() == index->num_types() &&
      tab->index().max_total() == index->max_total())
    return evaluate_policy(sc, *tab);
  return evaluate_policy(sc, tabulate(policy, index, sc.periods()));
}

double ce_gap_term(const Scenario& sc, std::span<const int> x) {
  const Totals tot = totals(sc, x);
  const double gap_w = sc.capacity_weight() - tot.weight_mean;
  const double gap_v = sc.capacity_volume() - tot.volume_mean;
  return 0.5 * sc.penalty_weight() * (std::sqrt(tot.weight_var + gap_w * gap_w) - std::abs(gap_w)) +
         0.5 * sc.penalty_volume() * (std::sqrt(tot.volume_var + gap_v * gap_v) - std::abs(gap_v));
}

double ce_gap_bound(const Scenario& sc) {
  const StateIndex index(sc.num_types(), sc.max_bookings());
  double best = 0.0;
  for (std::int64_t s = 0; s < index.size(); ++s)
    best = std::max(best, ce_gap_term(sc, index.counts(s)));
  return best;
}

MonotonicityReport check_monotonicity(const ValueTable& table) {
  MonotonicityReport rep;
  const auto& idx = *table.index;
  const auto& V = table.values;
  const int T = table.periods();
  for (int t = 0; t <= T; ++t) {
    for (std::int64_t s = 0; s < idx.size(); ++s) {
      if (t < T) rep.worst_time = std::max(rep.worst_time, V(s, t + 1) - V(s, t));
      if (idx.at_limit(s)) continue;
      for (int i = 0; i < idx.num_types(); ++i)
        rep.worst_count = std::max(rep.worst_count, V(idx.successor(s, i), t) - V(s, t));
    }
  }
  return rep;
}

double max_price_residual(const Scenario& sc, const ExactSolution& sol) {
  const auto& idx = *sol.values.index;
  const auto& V = sol.values.values;
  double worst = 0.0;
  for (int t = 0; t < sc.periods(); ++t) {
    for (std::int64_t s = 0; s < idx.size(); ++s) {
      if (idx.at_limit(s)) continue;
      for (int i = 0; i < sc.num_types(); ++i) {
        const double c = V(s, t + 1) - V(idx.successor(s, i), t + 1);
        const auto p = problem_for(sc, t, i, c);
        const double r = sol.policy->at(t, s, i);
        double err = std::abs(price_residual(p, r)) / std::max(1.0, r);
        // Prices never fall below the unit opportunity cost.
        if (r < std::max(c, 0.0) / p.chargeable) err = std::max(err, 1.0);
        worst = std::max(worst, err);
      }
    }
  }
  return worst;
}

}  // namespace cargo
