#pragma once

// MDP over cumulative expected weight and volume, sampled on an (A+1) x (B+1)
// lattice and interpolated bilinearly. WV pricing reads opportunity costs off
// the grid; WVS does the same with per-type displacements shifted by theta sds.

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "cargo/domain.hpp"
#include "cargo/policy.hpp"

namespace cargo {

struct GridSpec {
  int weight_segments = 50;   // A
  int volume_segments = 50;   // B
  double weight_step = 0;     // dw, kg
  double volume_step = 0;     // dv, cm^3
};

/// Throws ConfigError on non-positive counts or steps.
void validate(const GridSpec& spec);

/// Lattice covering (1 + margin) times the capacity in each dimension.
GridSpec margin_grid_spec(const Scenario& scenario, int segments_w, int segments_v,
                          double margin = 0.6);

/// The scenario's recommended lattice if it carries one, else the margin rule at 50 x 50.
GridSpec default_grid_spec(const Scenario& scenario);

/// Same extent split into A x B segments.
GridSpec with_segments(const GridSpec& spec, int segments_w, int segments_v);

/// Same extent with `factor` times as many segments in each dimension.
GridSpec refine(const GridSpec& spec, int factor);

namespace detail {

// Cell coordinate u in [0, segments - 1] plus the local offset, snapping to the
// nearest lattice line when within 1e-9. Offsets outside [0, 1] extrapolate.
inline void locate(double position, double step, int segments, int& cell, double& offset) {
  double u = position / step;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= 1e-9 * std::max(1.0, std::abs(u))) u = nearest;
  const double base = std::floor(u);
  cell = base < 0 ? 0 : (base > segments - 1 ? segments - 1 : static_cast<int>(base));
  offset = u - cell;
}

}  // namespace detail

/// Bilinear value at (w, v) of a lattice slice with the given steps. Points off
/// the lattice use the nearest boundary cell's bilinear form.
template <typename Slice>
double bilinear(const Slice& slice, double weight_step, double volume_step, double w, double v) {
  const int A = static_cast<int>(slice.rows()) - 1;
  const int B = static_cast<int>(slice.cols()) - 1;
  int a, b;
  double al, be;
  detail::locate(w, weight_step, A, a, al);
  detail::locate(v, volume_step, B, b, be);
  if (al == 0.0 && be == 0.0) return slice(a, b);
  return (1 - al) * (1 - be) * slice(a, b) + (1 - al) * be * slice(a, b + 1) +
         al * (1 - be) * slice(a + 1, b) + al * be * slice(a + 1, b + 1);
}

class ValueGrid {
 public:
  ValueGrid(GridSpec spec, int periods);

  const GridSpec& spec() const { return spec_; }
  int periods() const { return static_cast<int>(slices_.size()) - 1; }

  const Eigen::MatrixXd& slice(int period) const { return slices_[period]; }
  /// Mutable access; used by the solver and by tests that inject faults.
  Eigen::MatrixXd& slice(int period) { return slices_[period]; }

  double weight_at(int a) const { return a * spec_.weight_step; }
  double volume_at(int b) const { return b * spec_.volume_step; }

  double value(int period, double w, double v) const {
    return bilinear(slices_[period], spec_.weight_step, spec_.volume_step, w, v);
  }
  /// Value at the empty hold in period 0.
  double initial() const { return slices_[0](0, 0); }

 private:
  GridSpec spec_;
  std::vector<Eigen::MatrixXd> slices_;
};

ValueGrid solve_wv_grid(const Scenario& scenario, const GridSpec& spec);
inline ValueGrid solve_wv_grid(const Scenario& scenario) {
  return solve_wv_grid(scenario, default_grid_spec(scenario));
}

/// Grid-backed pricing; theta = 0 is WV, theta != 0 is WVS. Totals at x_max reject.
class WvPolicy final : public PricingPolicy {
 public:
  WvPolicy(std::shared_ptr<const ValueGrid> grid, const Scenario& scenario, double theta);

  double price(int period, std::span<const int> counts, int type) const override;
  void prices(int period, std::span<const int> counts, std::span<double> out) const override;

  double theta() const { return theta_; }
  const ValueGrid& grid() const { return *grid_; }

 private:
  // Perceived totals of `counts`; false when the count limit is reached.
  bool locate(int period, std::span<const int> counts, double& w, double& v) const;
  double solve_one(int period, double w, double v, double base, int type) const;

  std::shared_ptr<const ValueGrid> grid_;
  double theta_;
  int max_total_;
  Eigen::VectorXd shift_w_, shift_v_, chargeable_;
  Eigen::MatrixXd scale_;  // T x m
  Eigen::VectorXd shape_;
};

struct ThetaPoint {
  double theta = 0;
  double revenue = 0;
  double improvement_pct = 0;  // vs theta = 0
};

struct ThetaCurve {
  std::vector<ThetaPoint> points;
  double best_theta = 0;
  double best_revenue = 0;
  double baseline_revenue = 0;  // theta = 0
};

struct ThetaRange {
  double min = 0.0;
  double max = 0.30;
  double step = 0.01;
  std::vector<double> values() const;
};

/// Evaluates `revenue(theta)` over the range and returns the curve and argmax,
/// breaking ties toward the smaller theta.
ThetaCurve theta_search(const ThetaRange& range, const std::function<double(double)>& revenue);

}  // namespace cargo
