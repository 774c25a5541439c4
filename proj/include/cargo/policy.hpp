#pragma once

// Uniform pricing-policy surface: (period, accepted counts, type) -> price per
// chargeable kg. +inf means "reject"; NaN means "no price defined here".

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "cargo/domain.hpp"
#include "cargo/state_index.hpp"

namespace cargo {

inline constexpr double kRejectPrice = std::numeric_limits<double>::infinity();

class PricingPolicy {
 public:
  virtual ~PricingPolicy() = default;

  virtual double price(int period, std::span<const int> counts, int type) const = 0;

  /// All types at once; overridden where the per-type work shares setup.
  virtual void prices(int period, std::span<const int> counts, std::span<double> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = price(period, counts, static_cast<int>(i));
  }
};

class RejectAllPolicy final : public PricingPolicy {
 public:
  double price(int, std::span<const int>, int) const override { return kRejectPrice; }
};

/// State-independent price r(t, i) from a T x m matrix.
class StaticPricePolicy final : public PricingPolicy {
 public:
  explicit StaticPricePolicy(Eigen::MatrixXd prices) : prices_(std::move(prices)) {}
  double price(int period, std::span<const int>, int type) const override {
    return prices_(period, type);
  }

 private:
  Eigen::MatrixXd prices_;
};

/// Another policy with every finite price shifted by a constant.
class ShiftedPolicy final : public PricingPolicy {
 public:
  ShiftedPolicy(std::shared_ptr<const PricingPolicy> base, double shift)
      : base_(std::move(base)), shift_(shift) {}
  double price(int period, std::span<const int> counts, int type) const override {
    return base_->price(period, counts, type) + shift_;
  }

 private:
  std::shared_ptr<const PricingPolicy> base_;
  double shift_;
};

/// Prices materialized over a StateIndex for every period: r_i(t, x).
/// Rows with |x|_1 = x_max hold kRejectPrice.
class TabulatedPolicy : public PricingPolicy {
 public:
  TabulatedPolicy(std::shared_ptr<const StateIndex> index, int periods);

  double price(int period, std::span<const int> counts, int type) const override;
  void prices(int period, std::span<const int> counts, std::span<double> out) const override;

  double at(int period, std::int64_t state, int type) const {
    return table_[offset(period, state) + type];
  }
  double& at(int period, std::int64_t state, int type) {
    return table_[offset(period, state) + type];
  }

  const StateIndex& index() const { return *index_; }
  std::shared_ptr<const StateIndex> shared_index() const { return index_; }
  int periods() const { return periods_; }
  std::span<const double> raw() const { return table_; }
  std::span<double> raw() { return table_; }

 private:
  std::size_t offset(int period, std::int64_t state) const {
    return (static_cast<std::size_t>(period) * index_->size() + state) * index_->num_types();
  }

  std::shared_ptr<const StateIndex> index_;
  int periods_;
  std::vector<double> table_;
};

/// Optimal or certainty-equivalent prices from backward induction.
using ExactPolicy = TabulatedPolicy;

/// Evaluates `policy` on every (t, x, i) of `index`; rows at the x_max limit
/// get kRejectPrice.
TabulatedPolicy tabulate(const PricingPolicy& policy, std::shared_ptr<const StateIndex> index,
                         int periods);

}  // namespace cargo
