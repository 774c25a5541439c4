#pragma once

// Per-type pricing fixed point r = (1 - F(r)) / f(r) + c / Q for Weibull
// reservation prices. With shape >= 1 the left side minus the right is strictly
// increasing, so the root is unique and is the revenue-maximizing price.

#include <limits>

namespace cargo {

struct PricingProblem {
  double scale = 1.0;             // Weibull alpha in this period
  double shape = 1.0;             // Weibull beta, must be >= 1
  double opportunity_cost = 0.0;  // c; +inf means the type is priced out
  double chargeable = 1.0;        // Q
  double arrival_mass = 0.0;      // m_t
};

struct PriceSolution {
  double price = 0.0;
  double gain = 0.0;  // m (1 - F(r)) (r Q - c)
  int iterations = 0;
};

/// Solves the fixed point for max(c, 0) / Q and reports the gain at the root
/// against the unclamped c. `lower_hint` may tighten the bracket when a valid
/// lower bound on the root is known (ignored if it is not one).
PriceSolution solve_price(const PricingProblem& problem,
                          double lower_hint = -std::numeric_limits<double>::infinity());

/// r - alpha^beta / (beta r^(beta - 1)) - max(c, 0) / Q.
double price_residual(const PricingProblem& problem, double price);

/// m (1 - F(r)) (r Q - c) for an arbitrary price r (r = +inf gives 0).
double expected_gain(const PricingProblem& problem, double price);

/// Relative tolerance every returned root satisfies.
inline constexpr double kPriceTolerance = 1e-9;

}  // namespace cargo
