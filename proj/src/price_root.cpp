#include "cargo/price_root.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cargo/errors.hpp"

namespace cargo {

namespace {

constexpr int kMaxIterations = 200;

void check(const PricingProblem& p) {
  if (!(p.shape >= 1.0)) {
    std::ostringstream os;
    os << "Weibull shape " << p.shape << " < 1 has no unique optimal price";
    throw DomainError(os.str());
  }
  if (!(p.scale > 0)) throw DomainError("Weibull scale must be positive");
  if (!(p.chargeable > 0)) throw DomainError("chargeable weight must be positive");
  if (!(p.arrival_mass >= 0 && p.arrival_mass <= 1.0 + 1e-12))
    throw DomainError("arrival mass must lie in [0, 1]");
  if (std::isnan(p.opportunity_cost)) throw DomainError("opportunity cost is NaN");
}

// alpha^beta / (beta r^(beta - 1)) written as (alpha / beta) (alpha / r)^(beta - 1).
double inverse_hazard(double alpha, double beta, double r) {
  return alpha / beta * std::pow(alpha / r, beta - 1.0);
}

}  // namespace

double price_residual(const PricingProblem& p, double r) {
  const double k = std::max(p.opportunity_cost, 0.0) / p.chargeable;
  return r - inverse_hazard(p.scale, p.shape, r) - k;
}

double expected_gain(const PricingProblem& p, double r) {
  if (std::isinf(r) || p.arrival_mass == 0.0) return 0.0;
  const double survival = r <= 0 ? 1.0 : std::exp(-std::pow(r / p.scale, p.shape));
  return p.arrival_mass * survival * (r * p.chargeable - p.opportunity_cost);
}

PriceSolution solve_price(const PricingProblem& p, double lower_hint) {
  check(p);
  if (std::isinf(p.opportunity_cost) && p.opportunity_cost > 0)
    return {std::numeric_limits<double>::infinity(), 0.0, 0};

  const double alpha = p.scale, beta = p.shape;
  const double k = std::max(p.opportunity_cost, 0.0) / p.chargeable;
  const double monopoly = alpha * std::pow(beta, -1.0 / beta);

  PriceSolution out;
  if (beta == 1.0) {
    out.price = alpha + k;
  } else if (k == 0.0) {
    out.price = monopoly;
  } else {
    // Root lies in [max(k, monopoly), k + monopoly]; G is increasing and concave,
    // so Newton from the left end converges monotonically. Bisection guards it.
    double lo = std::max(k, monopoly);
    double hi = k + monopoly;
    if (lower_hint > lo && lower_hint < hi && price_residual(p, lower_hint) <= 0) lo = lower_hint;
    double r = lo;
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
      out.iterations = it + 1;
      const double g = price_residual(p, r);
      if (std::abs(g) <= 0.25 * kPriceTolerance * std::max(1.0, r)) {
        converged = true;
        break;
      }
      if (g < 0) lo = std::max(lo, r);
      else hi = std::min(hi, r);
      const double slope = 1.0 + (beta - 1.0) / r * inverse_hazard(alpha, beta, r);
      double next = r - g / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == r) {
        converged = std::abs(g) <= kPriceTolerance * std::max(1.0, r);
        break;
      }
      r = next;
    }
    if (!converged) {
      std::ostringstream os;
      os.precision(17);
      os << "price fixed point did not converge (alpha=" << alpha << ", beta=" << beta
         << ", c/Q=" << k << ")";
      throw NumericalError(os.str());
    }
    out.price = r;
  }
  out.gain = expected_gain(p, out.price);
  return out;
}

}  // namespace cargo
