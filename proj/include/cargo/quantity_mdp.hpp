#pragma once

// One-dimensional aggregation over the total number of accepted bookings.
// PQ solves the aggregated Bellman recursion with a pooled normal weight/volume
// model; AQ replaces Q_i by the pooled Q^s in the opportunity-cost term.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "cargo/domain.hpp"
#include "cargo/policy.hpp"

namespace cargo {

struct PooledDistribution {
  std::vector<double> mix;  // p_i
  double weight_mean = 0, weight_sd = 0;
  double volume_mean = 0, volume_sd = 0;
  double chargeable = 0;  // Q^s
};

PooledDistribution pool_types(const Scenario& scenario);

enum class QuantityKind { Primal, Augmented };

struct QValueTable {
  QuantityKind kind = QuantityKind::Primal;
  int max_total = 0;
  int num_types = 0;
  int periods = 0;
  Eigen::MatrixXd values;      // (x_max + 1) x (T + 1)
  std::vector<double> prices;  // [t][x][i], x = x_max rows hold kRejectPrice

  double value(int period, int total) const { return values(total, period); }
  double price(int period, int total, int type) const {
    return prices[(static_cast<std::size_t>(period) * (max_total + 1) + total) * num_types + type];
  }
  double& price(int period, int total, int type) {
    return prices[(static_cast<std::size_t>(period) * (max_total + 1) + total) * num_types + type];
  }
};

struct QuantityOptions {
  // Start each root search at r(t, x - 1), valid because PQ prices increase in x.
  bool prune_with_monotonicity = false;
};

/// Terminal value shared by PQ and AQ: penalty on i.i.d. pooled-normal sums.
double pooled_terminal_value(const Scenario& scenario, const PooledDistribution& pooled, int total);

QValueTable solve_pq(const Scenario& scenario, const QuantityOptions& options = {});
QValueTable solve_aq(const Scenario& scenario);

/// Prices r_i(t, |x|_1) from a quantity table.
class QuantityPolicy final : public PricingPolicy {
 public:
  explicit QuantityPolicy(std::shared_ptr<const QValueTable> table) : table_(std::move(table)) {}
  double price(int period, std::span<const int> counts, int type) const override;
  void prices(int period, std::span<const int> counts, std::span<double> out) const override;
  const QValueTable& table() const { return *table_; }

 private:
  std::shared_ptr<const QValueTable> table_;
};

struct StructureViolation {
  std::string property;  // "concavity", "marginal-time", "price-count", "price-time"
  int period = 0;
  int total = 0;
  int type = -1;
  double magnitude = 0;
};

struct StructureReport {
  std::vector<StructureViolation> violations;
  bool checked_price_time = false;  // only for time-homogeneous scenarios
  double slack = 0;
  bool ok() const { return violations.empty(); }
};

/// max over stored prices of |fixed-point residual| / max(1, r).
double max_price_residual(const Scenario& scenario, const QValueTable& table);

/// True when every arrival mass and scale is constant over periods.
bool is_time_homogeneous(const Scenario& scenario);

/// Verifies concavity in x, time monotonicity of the marginal value, prices
/// non-decreasing in x, and (time-homogeneous scenarios only) prices
/// non-increasing in t. Values are compared with slack 1e-9 * max|V|.
StructureReport check_pq_structure(const QValueTable& table, const Scenario& scenario);

}  // namespace cargo
