#include "cargo/domain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "cargo/errors.hpp"
#include "cargo/normal.hpp"

namespace cargo {

namespace {

constexpr double kTimeSlack = 1e-12;

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      hash_ ^= p[k];
      hash_ *= 1099511628211ull;
    }
  }
  void value(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    bytes(&bits, sizeof bits);
  }
  void value(std::int64_t x) { bytes(&x, sizeof x); }
  void rate(const PiecewiseLinearRate& r) {
    value(static_cast<std::int64_t>(r.knots().size()));
    for (const auto& k : r.knots()) {
      value(k.time);
      value(k.value);
    }
  }
  std::uint64_t get() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ull;
};

// Merged breakpoints of two functions on [a, b].
std::vector<double> merged_breaks(const PiecewiseLinearRate& f, const PiecewiseLinearRate& g,
                                  double a, double b) {
  std::vector<double> pts{a, b};
  for (const auto& k : f.knots())
    if (k.time > a && k.time < b) pts.push_back(k.time);
  for (const auto& k : g.knots())
    if (k.time > a && k.time < b) pts.push_back(k.time);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

PiecewiseLinearRate::PiecewiseLinearRate(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw DomainError("rate needs at least two knots");
  if (std::abs(knots_.front().time) > kTimeSlack)
    throw DomainError("rate must start at s = 0");
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    if (!(knots_[k].value >= 0) || !std::isfinite(knots_[k].value))
      throw DomainError("rate value must be finite and non-negative at s = " +
                        fmt_double(knots_[k].time));
    if (k > 0 && !(knots_[k].time > knots_[k - 1].time))
      throw DomainError("rate knots must be strictly increasing in time");
  }
}

PiecewiseLinearRate PiecewiseLinearRate::constant(double value, double horizon) {
  return PiecewiseLinearRate({{0.0, value}, {horizon, value}});
}

double PiecewiseLinearRate::operator()(double s) const {
  if (s <= knots_.front().time) return knots_.front().value;
  if (s >= knots_.back().time) return knots_.back().value;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s,
                             [](double x, const Knot& k) { return x < k.time; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  const double u = (s - lo.time) / (hi.time - lo.time);
  return lo.value + u * (hi.value - lo.value);
}

PiecewiseLinearRate PiecewiseLinearRate::scaled(double factor) const {
  auto knots = knots_;
  for (auto& k : knots) k.value *= factor;
  return PiecewiseLinearRate(std::move(knots));
}

double integrate_rate(const PiecewiseLinearRate& rate, double a, double b) {
  const double horizon = rate.horizon();
  if (!(a >= -kTimeSlack) || !(b <= horizon * (1 + kTimeSlack) + kTimeSlack) || !(a <= b))
    throw DomainError("integration interval [" + fmt_double(a) + ", " + fmt_double(b) +
                      "] outside [0, " + fmt_double(horizon) + "]");
  a = std::max(a, 0.0);
  b = std::min(b, horizon);
  if (b <= a) return 0.0;
  double total = 0.0;
  double left = a;
  double f_left = rate(a);
  for (const auto& k : rate.knots()) {
    if (k.time <= a) continue;
    if (k.time >= b) break;
    total += 0.5 * (f_left + k.value) * (k.time - left);
    left = k.time;
    f_left = k.value;
  }
  total += 0.5 * (f_left + rate(b)) * (b - left);
  return total;
}

double integrate_product(const PiecewiseLinearRate& f, const PiecewiseLinearRate& g) {
  const double horizon = std::min(f.horizon(), g.horizon());
  const auto pts = merged_breaks(f, g, 0.0, horizon);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1], mid = 0.5 * (a + b);
    total += (b - a) / 6.0 * (f(a) * g(a) + 4.0 * f(mid) * g(mid) + f(b) * g(b));
  }
  return total;
}

double weibull_cdf(double scale, double shape, double price) {
  if (price <= 0) return 0.0;
  return -std::expm1(-std::pow(price / scale, shape));
}

double weibull_survival(double scale, double shape, double price) {
  if (price <= 0) return 1.0;
  if (std::isinf(price)) return 0.0;
  return std::exp(-std::pow(price / scale, shape));
}

double weibull_mean(double scale, double shape) { return scale * std::tgamma(1.0 + 1.0 / shape); }

double WeibullPriceModel::cdf(double s, double price) const {
  return weibull_cdf(scale(s), shape, price);
}

double WeibullPriceModel::mean(double s) const { return weibull_mean(scale(s), shape); }

void validate(const BookingType& t) {
  if (!(t.weight_mean > 0) || !(t.volume_mean > 0))
    throw DomainError("booking type '" + t.label + "': means must be positive");
  if (!(t.weight_sd >= 0) || !(t.volume_sd >= 0))
    throw DomainError("booking type '" + t.label + "': standard deviations must be >= 0");
  if (!(t.price.shape > 0)) throw DomainError("booking type '" + t.label + "': shape must be > 0");
  if (t.arrival.knots().empty() || t.price.scale.knots().empty())
    throw DomainError("booking type '" + t.label + "': missing rate or scale function");
  for (const auto& k : t.price.scale.knots())
    if (!(k.value > 0)) throw DomainError("booking type '" + t.label + "': scale must be > 0");
}

double chargeable_weight_mean(const BookingType& t, double gamma) {
  if (!(gamma > 0)) throw DomainError("gamma must be positive");
  return expected_max_of_normals(t.weight_mean, t.weight_sd, t.volume_mean / gamma,
                                 t.volume_sd / gamma);
}

EtaPair compute_eta(std::span<const BookingType> types, double gamma) {
  EtaPair out;
  for (const auto& t : types) {
    const double arrivals = integrate_rate(t.arrival, 0.0, t.arrival.horizon());
    out.demand_weight += arrivals * t.weight_mean;
    out.demand_volume += arrivals * t.volume_mean;
    const double gamma_factor = std::tgamma(1.0 + 1.0 / t.price.shape);
    out.revenue += gamma_factor * chargeable_weight_mean(t, gamma) *
                   integrate_product(t.arrival, t.price.scale);
  }
  if (!(out.demand_weight > 0) || !(out.demand_volume > 0) || !(out.revenue > 0))
    throw ConfigError("scenario has zero total demand; cannot normalize penalties");
  out.weight = out.revenue / out.demand_weight;
  out.volume = out.revenue / out.demand_volume;
  return out;
}

Scenario::Scenario(ScenarioSpec spec) : spec_(std::move(spec)) {
  const int m = num_types();
  if (m == 0) throw ConfigError("scenario needs at least one booking type");
  if (!(spec_.horizon > 0)) throw ConfigError("horizon must be positive");
  if (spec_.periods < 1) throw ConfigError("period count must be >= 1");
  if (!(spec_.gamma > 0)) throw ConfigError("gamma must be positive");
  if (!(spec_.penalty_factor >= 0)) throw ConfigError("penalty factor must be >= 0");
  for (const auto& t : spec_.types) {
    validate(t);
    const double tol = 1e-9 * spec_.horizon;
    if (std::abs(t.arrival.horizon() - spec_.horizon) > tol ||
        std::abs(t.price.scale.horizon() - spec_.horizon) > tol)
      throw ConfigError("booking type '" + t.label + "': rate functions must end at L = " +
                        fmt_double(spec_.horizon));
  }

  if (spec_.eta_override) {
    for (const auto& t : spec_.types) {
      const double arrivals = integrate_rate(t.arrival, 0.0, spec_.horizon);
      eta_.demand_weight += arrivals * t.weight_mean;
      eta_.demand_volume += arrivals * t.volume_mean;
    }
    eta_.weight = spec_.eta_override->first;
    eta_.volume = spec_.eta_override->second;
    if (!(eta_.weight >= 0) || !(eta_.volume >= 0)) throw ConfigError("eta must be >= 0");
  } else {
    eta_ = compute_eta(spec_.types, spec_.gamma);
  }

  if (spec_.capacity.mode == CapacitySpec::Mode::Ratio) {
    if (!(spec_.capacity.c_over_d > 0)) throw ConfigError("C/D must be positive");
    capacity_weight_ = spec_.capacity.c_over_d * eta_.demand_weight;
    capacity_volume_ = spec_.capacity.c_over_d * eta_.demand_volume;
  } else {
    capacity_weight_ = spec_.capacity.weight;
    capacity_volume_ = spec_.capacity.volume;
  }
  if (!(capacity_weight_ > 0) || !(capacity_volume_ > 0))
    throw ConfigError("capacities must be positive");

  if (spec_.max_bookings) {
    if (*spec_.max_bookings < 0) throw ConfigError("x_max must be >= 0");
    max_bookings_ = *spec_.max_bookings;
  } else {
    double min_weight = std::numeric_limits<double>::infinity();
    for (const auto& t : spec_.types) min_weight = std::min(min_weight, t.weight_mean);
    max_bookings_ = static_cast<int>(std::ceil(capacity_weight_ / min_weight - 1e-9));
  }

  const int periods = spec_.periods;
  const double dt = period_length();
  chargeable_.resize(m);
  arrival_mass_.resize(periods, m);
  price_scale_.resize(periods, m);
  for (int i = 0; i < m; ++i) {
    const auto& t = spec_.types[i];
    chargeable_(i) = chargeable_weight_mean(t, spec_.gamma);
    for (int p = 0; p < periods; ++p) {
      const double a = p * dt;
      const double b = (p + 1 == periods) ? spec_.horizon : (p + 1) * dt;
      arrival_mass_(p, i) = integrate_rate(t.arrival, a, b);
      price_scale_(p, i) = t.price.scale(a);
    }
  }
  for (int p = 0; p < periods; ++p) {
    const double total = arrival_mass_.row(p).sum();
    if (total > 1.0 + 1e-12)
      throw ConfigError("period " + std::to_string(p) + " has total arrival mass " +
                        fmt_double(total) + " > 1; use more periods");
  }

  Fnv1a h;
  h.value(static_cast<std::int64_t>(m));
  h.value(spec_.horizon);
  h.value(static_cast<std::int64_t>(periods));
  h.value(spec_.gamma);
  h.value(capacity_weight_);
  h.value(capacity_volume_);
  h.value(spec_.penalty_factor);
  h.value(eta_.weight);
  h.value(eta_.volume);
  h.value(static_cast<std::int64_t>(max_bookings_));
  for (const auto& t : spec_.types) {
    h.value(t.weight_mean);
    h.value(t.weight_sd);
    h.value(t.volume_mean);
    h.value(t.volume_sd);
    h.rate(t.arrival);
    h.rate(t.price.scale);
    h.value(t.price.shape);
  }
  digest_ = h.get();
}

double Scenario::terminal_penalty(double total_weight, double total_volume) const {
  return linear_penalty(total_weight - capacity_weight_, eta_.weight, spec_.penalty_factor) +
         linear_penalty(total_volume - capacity_volume_, eta_.volume, spec_.penalty_factor);
}

void apply_cv(std::vector<BookingType>& types, double cv) {
  if (!(cv >= 0)) throw DomainError("cv must be >= 0");
  for (auto& t : types) {
    t.weight_sd = cv * t.weight_mean;
    t.volume_sd = cv * t.volume_mean;
  }
}

ScenarioSpec toy_scenario_spec(double pf, double c_over_d, double cv) {
  constexpr double L = 75.0;
  const double peak = 2.0 * L / 3.0;
  auto tent = [&](double start, double top, double end) {
    return PiecewiseLinearRate({{0.0, start}, {peak, top}, {L, end}});
  };
  auto ramp = [&](double base) { return PiecewiseLinearRate({{0.0, base}, {L, 1.5 * base}}); };

  ScenarioSpec spec;
  spec.name = "toy-m3";
  spec.horizon = L;
  spec.periods = 225;
  spec.gamma = 6000.0;
  spec.types = {
      {"type1", 100.0, 0.0, 60e4, 0.0, tent(0.04, 0.12, 0.08), {ramp(4.0), 5.0}},
      {"type2", 75.0, 0.0, 50e4, 0.0, tent(0.025, 0.075, 0.05), {ramp(3.0), 5.0}},
      {"type3", 150.0, 0.0, 75e4, 0.0, tent(0.03, 0.09, 0.06), {ramp(3.0), 5.0}},
  };
  apply_cv(spec.types, cv);
  spec.capacity = {CapacitySpec::Mode::Ratio, c_over_d, 0.0, 0.0};
  spec.penalty_factor = pf;
  spec.lattice = LatticeHint{50, 50, 50.0, 30e4};
  return spec;
}

Scenario build_toy_scenario(double pf, double c_over_d, double cv) {
  return Scenario(toy_scenario_spec(pf, c_over_d, cv));
}

ScenarioSpec large_scenario_spec(double pf, double c_over_d, double cv) {
  constexpr double L = 14.0;
  const PiecewiseLinearRate total_rate({{0.0, 0.05}, {7.5, 0.8}, {12.5, 5.0}, {14.0, 0.5}});

  struct Category {
    double weight;  // kg
    double volume;  // cm^3
    double probability;
    double scale_at_zero;
  };
  const Category categories[9] = {
      {80, 6e5, 0.0833, 4.0},   {160, 12e5, 0.0833, 3.6}, {400, 30e5, 0.0833, 3.2},
      {100, 6e5, 0.1667, 4.0},  {200, 12e5, 0.1668, 3.6}, {500, 30e5, 0.1667, 3.2},
      {100, 5e5, 0.0833, 4.0},  {200, 10e5, 0.0833, 3.6}, {500, 25e5, 0.0833, 3.2},
  };
  struct PriceClass {
    const char* name;
    double multiplier;
    double probability;
  };
  const PriceClass classes[3] = {{"medium", 1.0, 0.4}, {"high", 1.25, 0.3}, {"low", 0.75, 0.3}};

  ScenarioSpec spec;
  spec.name = "real-m27";
  spec.horizon = L;
  spec.periods = 350;
  spec.gamma = 6000.0;
  for (int c = 0; c < 9; ++c) {
    for (const auto& pc : classes) {
      const double a0 = pc.multiplier * categories[c].scale_at_zero;
      BookingType t;
      t.label = "cat" + std::to_string(c + 1) + "-" + pc.name;
      t.weight_mean = categories[c].weight;
      t.volume_mean = categories[c].volume;
      t.arrival = total_rate.scaled(categories[c].probability * pc.probability);
      t.price = {PiecewiseLinearRate({{0.0, a0}, {L, 1.5 * a0}}), 5.0};
      spec.types.push_back(std::move(t));
    }
  }
  apply_cv(spec.types, cv);
  spec.capacity = {CapacitySpec::Mode::Ratio, c_over_d, 0.0, 0.0};
  spec.penalty_factor = pf;
  spec.lattice = LatticeHint{50, 50, 160.0, 100e4};
  return spec;
}

Scenario build_large_scenario(double pf, double c_over_d, double cv) {
  return Scenario(large_scenario_spec(pf, c_over_d, cv));
}

ScenarioSpec builtin_scenario_spec(const std::string& name, double pf, double c_over_d,
                                   double cv) {
  if (name == "toy-m3") return toy_scenario_spec(pf, c_over_d, cv);
  if (name == "real-m27") return large_scenario_spec(pf, c_over_d, cv);
  throw ConfigError("unknown built-in scenario '" + name + "' (expected toy-m3 or real-m27)");
}

ScenarioSpec time_homogeneous_variant(ScenarioSpec spec) {
  for (auto& t : spec.types) {
    const double L = t.arrival.horizon();
    const double mean_rate = integrate_rate(t.arrival, 0.0, L) / L;
    t.arrival = PiecewiseLinearRate::constant(mean_rate, L);
    t.price.scale = PiecewiseLinearRate::constant(t.price.scale(0.0), t.price.scale.horizon());
  }
  spec.name += "-homogeneous";
  return spec;
}

}  // namespace cargo
