#include <doctest.h>

#include <cmath>
#include <random>

#include "cargo/domain.hpp"
#include "cargo/errors.hpp"
#include "cargo/normal.hpp"
#include "oracles.hpp"

using namespace cargo;
using doctest::Approx;

namespace {

// Toy type-1 rate, written out by hand for the oracles.
double toy_rate1(double s) { return s <= 50 ? 0.04 + 0.08 * s / 50 : 0.12 - 0.04 * (s - 50) / 25; }

}  // namespace

TEST_CASE("integrate_rate") {
  const auto c = PiecewiseLinearRate::constant(0.1, 75);
  CHECK(integrate_rate(c, 0, 1.0 / 3) == Approx(0.1 / 3).epsilon(1e-14));

  const auto sc = build_toy_scenario(1, 0.8, 0.2);
  const auto& r1 = sc.type(0).arrival;
  CHECK(integrate_rate(r1, 0, 75) == Approx(6.5).epsilon(1e-14));
  CHECK(integrate_rate(r1, 0, 75) ==
        Approx(oracle::simpson(toy_rate1, 0, 50, 1000) + oracle::simpson(toy_rate1, 50, 75, 1000)));
  CHECK(integrate_rate(r1, 12.3, 12.3) == 0.0);

  SUBCASE("additive") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 75);
    for (int k = 0; k < 200; ++k) {
      double p[3] = {u(rng), u(rng), u(rng)};
      std::sort(p, p + 3);
      const double whole = integrate_rate(r1, p[0], p[2]);
      const double parts = integrate_rate(r1, p[0], p[1]) + integrate_rate(r1, p[1], p[2]);
      CHECK(whole == Approx(parts).epsilon(1e-14));
    }
  }
  SUBCASE("outside the horizon") {
    CHECK_THROWS_AS(integrate_rate(r1, -0.1, 1), DomainError);
    CHECK_THROWS_AS(integrate_rate(r1, 0, 75.5), DomainError);
  }
  SUBCASE("invalid knots") {
    CHECK_THROWS_AS(PiecewiseLinearRate({{0, 1}, {0, 2}}), DomainError);
    CHECK_THROWS_AS(PiecewiseLinearRate({{1, 1}, {2, 2}}), DomainError);
    CHECK_THROWS_AS(PiecewiseLinearRate({{0, 1}, {2, -1}}), DomainError);
  }
}

TEST_CASE("integrate_product is exact for piecewise quadratics") {
  const PiecewiseLinearRate f({{0, 1}, {2, 3}, {5, 0.5}});
  const PiecewiseLinearRate g({{0, 2}, {3, 1}, {5, 4}});
  const double ref = oracle::simpson([&](double s) { return f(s) * g(s); }, 0, 2, 2000) +
                     oracle::simpson([&](double s) { return f(s) * g(s); }, 2, 3, 2000) +
                     oracle::simpson([&](double s) { return f(s) * g(s); }, 3, 5, 2000);
  CHECK(integrate_product(f, g) == Approx(ref).epsilon(1e-12));
}

TEST_CASE("normal partial expectation") {
  CHECK(normal_partial_expectation(3.0, 1.0, 3.0) == Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(normal_partial_expectation(5.0, 0.0, 3.0) == 2.0);
  CHECK(normal_partial_expectation(0.0, 1.0, 1.0) == Approx(0.08331547).epsilon(1e-7));
  CHECK(normal_partial_expectation(0.0, 1.0, 1.0) ==
        Approx(oracle::partial_expectation(0, 1, 1)).epsilon(1e-10));

  SUBCASE("deep tails against quadrature") {
    for (double c : {-6.0, -2.0, 2.5, 5.0, 9.0, 15.0}) {
      const double ref = oracle::partial_expectation(10, 2, 10 + 2 * c);
      CHECK(normal_partial_expectation(10.0, 2.0, 10 + 2 * c) ==
            Approx(ref).epsilon(1e-8).scale(1e-300));
    }
  }
  SUBCASE("convex and non-increasing in C") {
    const double h = 1e-3;
    for (double c = -5; c <= 5; c += 0.05) {
      const double a = normal_partial_expectation(0.0, 1.0, c - h);
      const double b = normal_partial_expectation(0.0, 1.0, c);
      const double d = normal_partial_expectation(0.0, 1.0, c + h);
      CHECK(d <= b * (1 + 1e-8));
      CHECK(a + d - 2 * b >= -1e-8 * b);
    }
  }
}

TEST_CASE("chargeable weight") {
  BookingType t{"t", 100, 0, 60e4, 0, PiecewiseLinearRate::constant(0.1, 1), {}};
  t.price = {PiecewiseLinearRate::constant(4, 1), 5};
  CHECK(chargeable_weight_mean(t, 6000) == Approx(100).epsilon(1e-15));
  t.weight_mean = 150;
  t.volume_mean = 75e4;
  CHECK(chargeable_weight_mean(t, 6000) == Approx(150).epsilon(1e-15));

  t = {"t", 100, 20, 60e4, 12e4, t.arrival, t.price};
  const double q = chargeable_weight_mean(t, 6000);
  CHECK(q == Approx(100 + std::sqrt(800.0) * oracle::phi(0)).epsilon(1e-12));
  const auto mc = oracle::expected_max(100, 20, 100, 20, 10'000'000, 11);
  CHECK(std::abs(q - mc.mean) <= 3 * mc.se);
  CHECK(q == Approx(111.28).epsilon(1e-4));

  SUBCASE("randomized parameter sets against Monte Carlo") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mean(20, 400), cv(0, 0.6);
    for (int k = 0; k < 20; ++k) {
      const double mw = mean(rng), mv = mean(rng), sw = cv(rng) * mw, sv = cv(rng) * mv;
      BookingType b{"r", mw, sw, mv * 6000, sv * 6000, t.arrival, t.price};
      const double closed = chargeable_weight_mean(b, 6000);
      const auto est = oracle::expected_max(mw, sw, mv, sv, 1'000'000, 100 + k);
      CHECK(std::abs(closed - est.mean) <= 3 * est.se);
      CHECK(closed >= std::max(mw, mv) - 1e-12);
    }
  }
}

TEST_CASE("Weibull helpers") {
  CHECK(weibull_mean(4, 5) == Approx(3.6726).epsilon(1e-4));
  CHECK(weibull_mean(4, 5) == Approx(oracle::weibull_mean(4, 5)).epsilon(1e-9));
  CHECK(weibull_mean(2.5, 1) == Approx(oracle::weibull_mean(2.5, 1)).epsilon(1e-9));
  CHECK(weibull_cdf(4, 5, 4) == Approx(1 - std::exp(-1.0)));
  CHECK(weibull_survival(4, 5, 0) == 1.0);
}

TEST_CASE("linear penalty") {
  CHECK(linear_penalty(-3, 2, 1) == 0.0);
  CHECK(linear_penalty(10, 2, 1.25) == 25.0);
  CHECK(linear_penalty(0, 2, 1.25) == 0.0);
}

TEST_CASE("eta normalization") {
  SUBCASE("single type by hand") {
    BookingType t{"t", 5, 0, 5 * 6000, 0, PiecewiseLinearRate::constant(1, 1), {}};
    // Weibull with beta = 1 has mean alpha; Q = 5 here, so R = 2 * 5 = 10 and D_w = 5.
    t.price = {PiecewiseLinearRate::constant(2, 1), 1};
    const auto eta = compute_eta(std::span(&t, 1), 6000);
    CHECK(eta.revenue == Approx(10));
    CHECK(eta.demand_weight == Approx(5));
    CHECK(eta.weight == Approx(2));
  }
  SUBCASE("toy scenario against brute-force quadrature") {
    const auto sc = build_toy_scenario(1, 0.8, 0.0);
    CHECK(sc.demand_weight() == Approx(1685.9375).epsilon(1e-12));
    CHECK(sc.demand_volume() == Approx(958.75e4).epsilon(1e-12));
    // Q_i = max(w_i, v_i / gamma) with cv = 0.
    const double Q[3] = {100, 5e5 / 6000, 150};
    double R = 0;
    for (int i = 0; i < 3; ++i) {
      const auto& t = sc.type(i);
      const double g = std::tgamma(1 + 1 / t.price.shape);
      R += Q[i] * oracle::simpson([&](double s) { return t.arrival(s) * t.price.scale(s) * g; }, 0,
                                  75, 1000);
    }
    CHECK(sc.eta_weight() == Approx(R / 1685.9375).epsilon(1e-10));
    CHECK(sc.eta_weight() * sc.demand_weight() ==
          Approx(sc.eta_volume() * sc.demand_volume()).epsilon(1e-10));
  }
  SUBCASE("zero demand") {
    BookingType t{"t", 5, 0, 5, 0, PiecewiseLinearRate::constant(0, 1), {}};
    t.price = {PiecewiseLinearRate::constant(2, 1), 1};
    CHECK_THROWS_AS(compute_eta(std::span(&t, 1), 6000), ConfigError);
  }
}

TEST_CASE("toy scenario") {
  const auto sc = build_toy_scenario(1, 0.8, 0.2);
  CHECK(sc.num_types() == 3);
  CHECK(sc.periods() == 225);
  CHECK(sc.period_length() == Approx(1.0 / 3));
  CHECK(sc.demand_weight() == Approx(1690).epsilon(0.01));
  CHECK(sc.capacity_weight() == Approx(0.8 * sc.demand_weight()));
  CHECK(sc.max_bookings() == static_cast<int>(std::ceil(sc.capacity_weight() / 75)));
  CHECK(build_toy_scenario(1, 1.0, 0.3).demand_volume() == Approx(960e4).epsilon(0.01));
  const auto flat = build_toy_scenario(1, 0.9, 0.0);
  for (const auto& t : flat.types()) {
    CHECK(t.weight_sd == 0.0);
    CHECK(t.volume_sd == 0.0);
  }
  double mass = 0;
  for (int t = 0; t < sc.periods(); ++t) mass += sc.arrival_mass(t, 0);
  CHECK(mass == Approx(6.5).epsilon(1e-12));
}

TEST_CASE("large scenario") {
  const auto sc = build_large_scenario(1, 0.8, 0.2);
  CHECK(sc.num_types() == 27);
  CHECK(sc.periods() == 350);
  double arrivals = 0;
  for (const auto& t : sc.types()) arrivals += integrate_rate(t.arrival, 0, 14);
  CHECK(arrivals == Approx(21.8125).epsilon(1e-12));
  CHECK(sc.demand_weight() == Approx(5530).epsilon(0.005));
  CHECK(sc.demand_volume() == Approx(3340e4).epsilon(0.005));
  // Per-type rates partition the total rate.
  const PiecewiseLinearRate total({{0.0, 0.05}, {7.5, 0.8}, {12.5, 5.0}, {14.0, 0.5}});
  for (double s : {0.0, 3.0, 7.5, 10.0, 13.9}) {
    double sum = 0;
    for (const auto& t : sc.types()) sum += t.arrival(s);
    CHECK(sum == Approx(total(s)).epsilon(1e-12));
  }
}

TEST_CASE("scenario validation") {
  auto spec = toy_scenario_spec(1, 0.8, 0.2);
  spec.periods = 10;  // about 1.5 expected arrivals per period
  CHECK_THROWS_AS(Scenario{spec}, ConfigError);
  spec = toy_scenario_spec(1, -1, 0.2);
  CHECK_THROWS_AS(Scenario{spec}, ConfigError);
  spec = toy_scenario_spec(1, 0.8, 0.2);
  spec.types[0].price.shape = 0.0;
  CHECK_THROWS_AS(Scenario{spec}, DomainError);
  CHECK(build_toy_scenario(1, 0.8, 0.2).digest() != build_toy_scenario(1, 0.8, 0.3).digest());
  CHECK(build_toy_scenario(1, 0.8, 0.2).digest() == build_toy_scenario(1, 0.8, 0.2).digest());
}

TEST_CASE("time-homogeneous variant") {
  const Scenario sc(time_homogeneous_variant(toy_scenario_spec(1, 0.8, 0.2)));
  for (int t = 1; t < sc.periods(); ++t) {
    CHECK(sc.price_scale(t, 0) == sc.price_scale(0, 0));
    CHECK(sc.arrival_mass(t, 1) == Approx(sc.arrival_mass(0, 1)).epsilon(1e-12));
  }
}
