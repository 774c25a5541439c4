#include "cargo/wv_grid.hpp"

#include <algorithm>
#include <cmath>

#include "cargo/errors.hpp"
#include "cargo/parallel.hpp"
#include "cargo/price_root.hpp"

namespace cargo {

void validate(const GridSpec& s) {
  if (s.weight_segments < 1 || s.volume_segments < 1)
    throw ConfigError("grid needs at least one segment per dimension");
  if (!(s.weight_step > 0) || !(s.volume_step > 0) || !std::isfinite(s.weight_step) ||
      !std::isfinite(s.volume_step))
    throw ConfigError("grid steps must be positive and finite");
}

GridSpec margin_grid_spec(const Scenario& sc, int segments_w, int segments_v, double margin) {
  GridSpec s{segments_w, segments_v, sc.capacity_weight() * (1 + margin) / segments_w,
             sc.capacity_volume() * (1 + margin) / segments_v};
  validate(s);
  return s;
}

GridSpec default_grid_spec(const Scenario& sc) {
  if (const auto& hint = sc.spec().lattice) {
    if (hint->weight_step > 0 && hint->volume_step > 0)
      return {hint->weight_segments, hint->volume_segments, hint->weight_step, hint->volume_step};
    return margin_grid_spec(sc, hint->weight_segments, hint->volume_segments);
  }
  return margin_grid_spec(sc, 50, 50);
}

GridSpec with_segments(const GridSpec& s, int segments_w, int segments_v) {
  GridSpec out{segments_w, segments_v, s.weight_step * s.weight_segments / segments_w,
               s.volume_step * s.volume_segments / segments_v};
  validate(out);
  return out;
}

GridSpec refine(const GridSpec& s, int factor) {
  if (factor < 1) throw ConfigError("refinement factor must be >= 1");
  return {s.weight_segments * factor, s.volume_segments * factor, s.weight_step / factor,
          s.volume_step / factor};
}

ValueGrid::ValueGrid(GridSpec spec, int periods) : spec_(spec) {
  validate(spec_);
  slices_.assign(periods + 1,
                 Eigen::MatrixXd::Zero(spec_.weight_segments + 1, spec_.volume_segments + 1));
}

ValueGrid solve_wv_grid(const Scenario& sc, const GridSpec& spec) {
  const int T = sc.periods();
  const int m = sc.num_types();
  ValueGrid grid(spec, T);
  const int A = spec.weight_segments, B = spec.volume_segments;

  auto& last = grid.slice(T);
  for (int a = 0; a <= A; ++a)
    for (int b = 0; b <= B; ++b)
      last(a, b) = -sc.terminal_penalty(grid.weight_at(a), grid.volume_at(b));

  const std::int64_t points = static_cast<std::int64_t>(A + 1) * (B + 1);
  for (int t = T - 1; t >= 0; --t) {
    const auto& next = grid.slice(t + 1);
    auto& cur = grid.slice(t);
    parallel_for(points, [&](std::int64_t k) {
      const int a = static_cast<int>(k / (B + 1));
      const int b = static_cast<int>(k % (B + 1));
      const double w = grid.weight_at(a), v = grid.volume_at(b);
      const double base = next(a, b);
      double gain = 0.0;
      for (int i = 0; i < m; ++i) {
        const auto& type = sc.type(i);
        const double moved = bilinear(next, spec.weight_step, spec.volume_step,
                                      w + type.weight_mean, v + type.volume_mean);
        const double c = std::max(base - moved, 0.0);
        const PricingProblem p{sc.price_scale(t, i), sc.price_shape(i), c, sc.chargeable(i),
                               sc.arrival_mass(t, i)};
        gain += solve_price(p).gain;
      }
      cur(a, b) = base + gain;
    });
  }
  return grid;
}

WvPolicy::WvPolicy(std::shared_ptr<const ValueGrid> grid, const Scenario& sc, double theta)
    : grid_(std::move(grid)), theta_(theta), max_total_(sc.max_bookings()) {
  if (grid_->periods() != sc.periods())
    throw PolicyError("value grid and scenario disagree on the number of periods");
  const int m = sc.num_types();
  shift_w_.resize(m);
  shift_v_.resize(m);
  shape_.resize(m);
  for (int i = 0; i < m; ++i) {
    const auto& t = sc.type(i);
    shift_w_(i) = t.weight_mean + theta * t.weight_sd;
    shift_v_(i) = t.volume_mean + theta * t.volume_sd;
    shape_(i) = sc.price_shape(i);
  }
  chargeable_ = sc.chargeables();
  scale_.resize(sc.periods(), m);
  for (int t = 0; t < sc.periods(); ++t)
    for (int i = 0; i < m; ++i) scale_(t, i) = sc.price_scale(t, i);
}

bool WvPolicy::locate(int period, std::span<const int> counts, double& w, double& v) const {
  if (period < 0 || period >= scale_.rows())
    throw PolicyError("grid policy queried outside the horizon");
  int total = 0;
  w = 0.0;
  v = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    total += counts[j];
    w += counts[j] * shift_w_(j);
    v += counts[j] * shift_v_(j);
  }
  return total < max_total_;
}

double WvPolicy::solve_one(int period, double w, double v, double base, int i) const {
  const auto& gs = grid_->spec();
  const double moved = bilinear(grid_->slice(period + 1), gs.weight_step, gs.volume_step,
                                w + shift_w_(i), v + shift_v_(i));
  const PricingProblem p{scale_(period, i), shape_(i), std::max(base - moved, 0.0),
                         chargeable_(i), 0.0};
  return solve_price(p).price;
}

double WvPolicy::price(int period, std::span<const int> counts, int type) const {
  double w, v;
  if (!locate(period, counts, w, v)) return kRejectPrice;
  return solve_one(period, w, v, grid_->value(period + 1, w, v), type);
}

void WvPolicy::prices(int period, std::span<const int> counts, std::span<double> out) const {
  double w, v;
  if (!locate(period, counts, w, v)) {
    std::fill(out.begin(), out.end(), kRejectPrice);
    return;
  }
  const double base = grid_->value(period + 1, w, v);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = solve_one(period, w, v, base, static_cast<int>(i));
}

std::vector<double> ThetaRange::values() const {
  if (!(step > 0)) throw ConfigError("theta step must be positive");
  if (max < min) throw ConfigError("theta range is empty");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((max - min) / step + 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(std::round((min + k * step) * 1e12) / 1e12);
  return out;
}

ThetaCurve theta_search(const ThetaRange& range, const std::function<double(double)>& revenue) {
  ThetaCurve curve;
  const auto thetas = range.values();
  bool have_zero = false;
  for (double th : thetas) {
    const double r = revenue(th);
    curve.points.push_back({th, r, 0.0});
    if (th == 0.0) {
      have_zero = true;
      curve.baseline_revenue = r;
    }
  }
  if (!have_zero) curve.baseline_revenue = revenue(0.0);
  const double denom = std::abs(curve.baseline_revenue);
  curve.best_theta = curve.points.front().theta;
  curve.best_revenue = curve.points.front().revenue;
  for (auto& p : curve.points) {
    p.improvement_pct = denom > 0 ? (p.revenue - curve.baseline_revenue) / denom * 100.0 : 0.0;
    if (p.revenue > curve.best_revenue) {
      curve.best_revenue = p.revenue;
      curve.best_theta = p.theta;
    }
  }
  return curve;
}

}  // namespace cargo
