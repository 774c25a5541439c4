#pragma once

// Problem primitives for single-leg air-cargo spot pricing: time-varying arrival
// rates, Weibull reservation prices, booking types, and the full scenario with
// its per-period tables.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cargo {

/// Continuous piecewise-linear function of booking time s in [0, L].
class PiecewiseLinearRate {
 public:
  struct Knot {
    double time;
    double value;
  };

  PiecewiseLinearRate() = default;
  /// Knots must be strictly increasing in time, start at 0, and carry
  /// non-negative values. Throws DomainError otherwise.
  explicit PiecewiseLinearRate(std::vector<Knot> knots);

  static PiecewiseLinearRate constant(double value, double horizon);

  double operator()(double s) const;
  double horizon() const { return knots_.back().time; }
  std::span<const Knot> knots() const { return knots_; }

  /// Same breakpoints, every value multiplied by `factor`.
  PiecewiseLinearRate scaled(double factor) const;

 private:
  std::vector<Knot> knots_;
};

/// Exact integral of `rate` over [a, b]; trapezoid per linear segment.
double integrate_rate(const PiecewiseLinearRate& rate, double a, double b);

/// Exact integral of the product f(s) g(s) over [0, L]. The product is
/// piecewise quadratic on the merged breakpoints, so Simpson is exact.
double integrate_product(const PiecewiseLinearRate& f, const PiecewiseLinearRate& g);

struct WeibullPriceModel {
  PiecewiseLinearRate scale;  // alpha_s, price per chargeable kg
  double shape = 1.0;         // beta

  double cdf(double s, double price) const;
  double mean(double s) const;
};

double weibull_cdf(double scale, double shape, double price);
double weibull_survival(double scale, double shape, double price);
double weibull_mean(double scale, double shape);

struct BookingType {
  std::string label;
  double weight_mean = 0;  // kg
  double weight_sd = 0;    // kg
  double volume_mean = 0;  // cm^3
  double volume_sd = 0;    // cm^3
  PiecewiseLinearRate arrival;
  WeibullPriceModel price;
};

/// Throws DomainError on non-positive means, negative sds, or shape <= 0.
void validate(const BookingType& type);

/// E[max(W, V / gamma)] for independent normal W, V.
double chargeable_weight_mean(const BookingType& type, double gamma);

/// pf * eta * max(excess, 0).
inline double linear_penalty(double excess, double eta, double pf) {
  return excess > 0 ? pf * eta * excess : 0.0;
}

struct EtaPair {
  double weight = 0;  // price per kg
  double volume = 0;  // price per cm^3
  double revenue = 0; // sum_i int lambda E(RP) Q ds
  double demand_weight = 0;
  double demand_volume = 0;
};

/// Revenue per unit weight / volume such that eta_w D_w = eta_v D_v equals the
/// expected revenue of selling every request at its mean reservation price.
EtaPair compute_eta(std::span<const BookingType> types, double gamma);

struct CapacitySpec {
  enum class Mode { Ratio, Absolute };
  Mode mode = Mode::Ratio;
  double c_over_d = 1.0;
  double weight = 0;  // kg, Absolute mode
  double volume = 0;  // cm^3, Absolute mode
};

/// Optional lattice recommendation carried with built-in scenarios.
struct LatticeHint {
  int weight_segments = 50;
  int volume_segments = 50;
  double weight_step = 0;  // kg
  double volume_step = 0;  // cm^3
};

struct ScenarioSpec {
  std::string name = "custom";
  std::vector<BookingType> types;
  double horizon = 0;  // L
  int periods = 0;     // T
  double gamma = 6000.0;
  CapacitySpec capacity;
  double penalty_factor = 1.0;
  std::optional<int> max_bookings;  // x_max override
  // Explicit (eta_w, eta_v); when absent they come from compute_eta.
  std::optional<std::pair<double, double>> eta_override;
  std::optional<LatticeHint> lattice;
};

/// Immutable problem instance with all per-period quantities precomputed.
class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  int num_types() const { return static_cast<int>(spec_.types.size()); }
  const BookingType& type(int i) const { return spec_.types[i]; }
  std::span<const BookingType> types() const { return spec_.types; }

  int periods() const { return spec_.periods; }
  double horizon() const { return spec_.horizon; }
  double period_length() const { return spec_.horizon / spec_.periods; }
  double gamma() const { return spec_.gamma; }

  double capacity_weight() const { return capacity_weight_; }
  double capacity_volume() const { return capacity_volume_; }
  double demand_weight() const { return eta_.demand_weight; }
  double demand_volume() const { return eta_.demand_volume; }
  double eta_weight() const { return eta_.weight; }
  double eta_volume() const { return eta_.volume; }
  double penalty_factor() const { return spec_.penalty_factor; }
  double penalty_weight() const { return spec_.penalty_factor * eta_.weight; }  // h_w
  double penalty_volume() const { return spec_.penalty_factor * eta_.volume; }  // h_v
  int max_bookings() const { return max_bookings_; }

  /// Q_i.
  double chargeable(int i) const { return chargeable_(i); }
  const Eigen::VectorXd& chargeables() const { return chargeable_; }
  /// m_t^i, probability that a type-i request arrives in period t.
  double arrival_mass(int t, int i) const { return arrival_mass_(t, i); }
  const Eigen::MatrixXd& arrival_masses() const { return arrival_mass_; }
  /// Weibull scale of type i in period t, evaluated at s = t * dt.
  double price_scale(int t, int i) const { return price_scale_(t, i); }
  double price_shape(int i) const { return spec_.types[i].price.shape; }

  /// Deterministic terminal penalty on realized totals.
  double terminal_penalty(double total_weight, double total_volume) const;

  /// 64-bit FNV-1a over every parameter that affects the model.
  std::uint64_t digest() const { return digest_; }

 private:
  ScenarioSpec spec_;
  EtaPair eta_;
  double capacity_weight_ = 0;
  double capacity_volume_ = 0;
  int max_bookings_ = 0;
  Eigen::VectorXd chargeable_;
  Eigen::MatrixXd arrival_mass_;  // T x m
  Eigen::MatrixXd price_scale_;   // T x m
  std::uint64_t digest_ = 0;
};

/// Sets every weight / volume sd to cv times the corresponding mean.
void apply_cv(std::vector<BookingType>& types, double cv);

/// Three-type example: L = 75, dt = 1/3.
ScenarioSpec toy_scenario_spec(double pf, double c_over_d, double cv);
Scenario build_toy_scenario(double pf, double c_over_d, double cv);

/// 27-type example: nine cargo categories x three reservation-price classes,
/// L = 14 days, dt = 0.04.
ScenarioSpec large_scenario_spec(double pf, double c_over_d, double cv);
Scenario build_large_scenario(double pf, double c_over_d, double cv);

/// Builds a named built-in ("toy-m3", "real-m27"). Throws ConfigError otherwise.
ScenarioSpec builtin_scenario_spec(const std::string& name, double pf, double c_over_d,
                                   double cv);

/// Replaces every rate and scale function by a constant: rates by their
/// horizon average, scales by their value at s = 0.
ScenarioSpec time_homogeneous_variant(ScenarioSpec spec);

}  // namespace cargo
