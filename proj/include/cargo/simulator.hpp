#pragma once

// Monte Carlo evaluation of a pricing policy on the general model: at most one
// request per period, Weibull reservation prices, untruncated normal
// weight/volume realizations and the terminal penalty on realized totals.

#include <cstdint>
#include <string>
#include <vector>

#include "cargo/domain.hpp"
#include "cargo/policy.hpp"

namespace cargo {

struct SimulationConfig {
  int replications = 1000;
  std::uint64_t seed = 20240607;
  // Replications 2k and 2k+1 share streams, the second with mirrored draws.
  bool antithetic = false;
  // Reservation-price scale at the period midpoint instead of its start.
  bool scale_at_midpoint = false;
  std::string trace_path;  // per-request CSV when non-empty
};

struct SimulationReport {
  double mean = 0;
  double standard_error = 0;
  int replications = 0;
  std::uint64_t digest = 0;  // FNV-1a over the per-replication revenues
  std::vector<std::int64_t> accepted;  // per type, all replications
  double overbooking_frequency = 0;    // share of replications over C_w or C_v
  double negative_draw_frequency = 0;  // share of accepted bookings with W < 0 or V < 0
  std::vector<double> revenues;        // per replication
  std::vector<int> acceptances;        // per replication, all types
};

/// Throws ConfigError on an invalid config and PolicyError (naming t, x, i)
/// when the policy returns NaN at a reached state.
SimulationReport simulate(const Scenario& scenario, const PricingPolicy& policy,
                          const SimulationConfig& config);

/// Sum of values in a fixed pairwise order, independent of thread count.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace cargo
