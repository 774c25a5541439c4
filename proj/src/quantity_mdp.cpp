#include "cargo/quantity_mdp.hpp"

#include <algorithm>
#include <cmath>

#include "cargo/errors.hpp"
#include "cargo/normal.hpp"
#include "cargo/price_root.hpp"

namespace cargo {

namespace {

QValueTable allocate(const Scenario& sc, QuantityKind kind, const PooledDistribution& pooled) {
  QValueTable q;
  q.kind = kind;
  q.max_total = sc.max_bookings();
  q.num_types = sc.num_types();
  q.periods = sc.periods();
  q.values.resize(q.max_total + 1, q.periods + 1);
  q.prices.assign(static_cast<std::size_t>(q.periods) * (q.max_total + 1) * q.num_types,
                  kRejectPrice);
  for (int x = 0; x <= q.max_total; ++x)
    q.values(x, q.periods) = pooled_terminal_value(sc, pooled, x);
  return q;
}

}  // namespace

PooledDistribution pool_types(const Scenario& sc) {
  PooledDistribution p;
  const int m = sc.num_types();
  p.mix.resize(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    p.mix[i] = integrate_rate(sc.type(i).arrival, 0.0, sc.horizon());
    total += p.mix[i];
  }
  if (!(total > 0)) throw ConfigError("pooling needs a positive total arrival rate");
  for (auto& w : p.mix) w /= total;

  for (int i = 0; i < m; ++i) {
    p.weight_mean += p.mix[i] * sc.type(i).weight_mean;
    p.volume_mean += p.mix[i] * sc.type(i).volume_mean;
    p.chargeable += p.mix[i] * sc.chargeable(i);
  }
  double wv = 0.0, vv = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto& t = sc.type(i);
    const double dw = t.weight_mean - p.weight_mean;
    const double dv = t.volume_mean - p.volume_mean;
    wv += p.mix[i] * (t.weight_sd * t.weight_sd + dw * dw);
    vv += p.mix[i] * (t.volume_sd * t.volume_sd + dv * dv);
  }
  p.weight_sd = std::sqrt(wv);
  p.volume_sd = std::sqrt(vv);
  return p;
}

double pooled_terminal_value(const Scenario& sc, const PooledDistribution& p, int x) {
  const double root = std::sqrt(static_cast<double>(x));
  const double ew = normal_partial_expectation(x * p.weight_mean, root * p.weight_sd,
                                               sc.capacity_weight());
  const double ev = normal_partial_expectation(x * p.volume_mean, root * p.volume_sd,
                                               sc.capacity_volume());
  return -sc.penalty_weight() * ew - sc.penalty_volume() * ev;
}

QValueTable solve_pq(const Scenario& sc, const QuantityOptions& options) {
  const auto pooled = pool_types(sc);
  QValueTable q = allocate(sc, QuantityKind::Primal, pooled);
  const int m = sc.num_types();
  for (int t = q.periods - 1; t >= 0; --t) {
    q.values(q.max_total, t) = q.values(q.max_total, t + 1);
    for (int x = 0; x < q.max_total; ++x) {
      const double base = q.values(x, t + 1);
      const double c = base - q.values(x + 1, t + 1);
      double gain = 0.0;
      for (int i = 0; i < m; ++i) {
        const PricingProblem p{sc.price_scale(t, i), sc.price_shape(i), c, sc.chargeable(i),
                               sc.arrival_mass(t, i)};
        const double hint = (options.prune_with_monotonicity && x > 0)
                                ? q.price(t, x - 1, i)
                                : -std::numeric_limits<double>::infinity();
        const auto sol = solve_price(p, hint);
        q.price(t, x, i) = sol.price;
        gain += sol.gain;
      }
      q.values(x, t) = base + gain;
    }
  }
  return q;
}

QValueTable solve_aq(const Scenario& sc) {
  const auto pooled = pool_types(sc);
  QValueTable q = allocate(sc, QuantityKind::Augmented, pooled);
  const int m = sc.num_types();
  for (int t = q.periods - 1; t >= 0; --t) {
    q.values(q.max_total, t) = q.values(q.max_total, t + 1);
    for (int x = 0; x < q.max_total; ++x) {
      const double base = q.values(x, t + 1);
      const double c = base - q.values(x + 1, t + 1);
      double gain = 0.0;
      for (int i = 0; i < m; ++i) {
        PricingProblem p{sc.price_scale(t, i), sc.price_shape(i), c, pooled.chargeable,
                         sc.arrival_mass(t, i)};
        const double r = solve_price(p).price;
        q.price(t, x, i) = r;
        p.chargeable = sc.chargeable(i);
        gain += expected_gain(p, r);
      }
      q.values(x, t) = base + gain;
    }
  }
  return q;
}

double QuantityPolicy::price(int period, std::span<const int> counts, int type) const {
  int total = 0;
  for (int c : counts) total += c;
  if (total >= table_->max_total) return kRejectPrice;
  if (period < 0 || period >= table_->periods)
    throw PolicyError("quantity policy queried outside the horizon");
  return table_->price(period, total, type);
}

void QuantityPolicy::prices(int period, std::span<const int> counts, std::span<double> out) const {
  int total = 0;
  for (int c : counts) total += c;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = total >= table_->max_total ? kRejectPrice
                                        : table_->price(period, total, static_cast<int>(i));
}

double max_price_residual(const Scenario& sc, const QValueTable& q) {
  const double pooled = q.kind == QuantityKind::Augmented ? pool_types(sc).chargeable : 0.0;
  double worst = 0.0;
  for (int t = 0; t < q.periods; ++t)
    for (int x = 0; x < q.max_total; ++x) {
      const double c = q.values(x, t + 1) - q.values(x + 1, t + 1);
      for (int i = 0; i < q.num_types; ++i) {
        const PricingProblem p{sc.price_scale(t, i), sc.price_shape(i), c,
                               pooled > 0 ? pooled : sc.chargeable(i), sc.arrival_mass(t, i)};
        const double r = q.price(t, x, i);
        double err = std::abs(price_residual(p, r)) / std::max(1.0, r);
        if (r < std::max(c, 0.0) / p.chargeable) err = std::max(err, 1.0);
        worst = std::max(worst, err);
      }
    }
  return worst;
}

bool is_time_homogeneous(const Scenario& sc) {
  const auto& mass = sc.arrival_masses();
  for (int t = 1; t < sc.periods(); ++t)
    for (int i = 0; i < sc.num_types(); ++i) {
      if (std::abs(mass(t, i) - mass(0, i)) > 1e-12 * std::max(1.0, mass(0, i))) return false;
      if (sc.price_scale(t, i) != sc.price_scale(0, i)) return false;
    }
  return true;
}

StructureReport check_pq_structure(const QValueTable& q, const Scenario& sc) {
  StructureReport rep;
  const double scale = std::max(1.0, q.values.cwiseAbs().maxCoeff());
  rep.slack = 1e-9 * scale;
  const int X = q.max_total;
  const int T = q.periods;
  auto report = [&](const char* what, int t, int x, int i, double mag) {
    rep.violations.push_back({what, t, x, i, mag});
  };
  const auto& V = q.values;

  for (int t = 0; t <= T; ++t) {
    for (int x = 1; x + 1 <= X; ++x) {
      const double lhs = V(x, t) - V(x + 1, t);
      const double rhs = V(x - 1, t) - V(x, t);
      if (rhs - lhs > rep.slack) report("concavity", t, x, -1, rhs - lhs);
    }
    if (t < T) {
      for (int x = 0; x + 1 <= X; ++x) {
        const double now = V(x, t) - V(x + 1, t);
        const double later = V(x, t + 1) - V(x + 1, t + 1);
        if (later - now > rep.slack) report("marginal-time", t, x, -1, later - now);
      }
    }
  }
  auto price_slack = [](double r) { return 1e-9 * std::max(1.0, std::abs(r)); };
  for (int t = 0; t < T; ++t)
    for (int x = 0; x + 1 < X; ++x)
      for (int i = 0; i < q.num_types; ++i) {
        const double lo = q.price(t, x, i), hi = q.price(t, x + 1, i);
        if (lo - hi > price_slack(hi)) report("price-count", t, x, i, lo - hi);
      }
  if (is_time_homogeneous(sc)) {
    rep.checked_price_time = true;
    for (int t = 0; t + 1 < T; ++t)
      for (int x = 0; x < X; ++x)
        for (int i = 0; i < q.num_types; ++i) {
          const double now = q.price(t, x, i), next = q.price(t + 1, x, i);
          if (next - now > price_slack(now)) report("price-time", t, x, i, next - now);
        }
  }
  return rep;
}

}  // namespace cargo
