#include <doctest.h>

#include <cmath>
#include <random>

#include "cargo/exact_mdp.hpp"
#include "cargo/wv_grid.hpp"

using namespace cargo;
using doctest::Approx;

TEST_CASE("bilinear interpolation") {
  Eigen::MatrixXd slice = Eigen::MatrixXd::Constant(3, 4, 7.5);
  CHECK(bilinear(slice, 2.0, 5.0, 1.3, 7.7) == 7.5);

  Eigen::MatrixXd cell(2, 2);
  cell << 0, 0, 0, 4;
  CHECK(bilinear(cell, 1.0, 1.0, 0.5, 0.5) == 1.0);

  Eigen::MatrixXd ramp(5, 6);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 6; ++b) ramp(a, b) = std::sin(a + 3.0 * b);
  CHECK(bilinear(ramp, 0.1, 0.3, 0.2, 0.9) == ramp(2, 3));
  // Round-off in the position snaps to the lattice point.
  CHECK(bilinear(ramp, 0.1, 0.3, 0.1 * 3, 0.3 * 5) == ramp(3, 5));

  SUBCASE("affine fields are reproduced, including extrapolation") {
    Eigen::MatrixXd f(11, 9);
    const double a = 2.5, b = -0.75, c = 3.0, dw = 50, dv = 30;
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 8; ++j) f(i, j) = a * i * dw + b * j * dv + c;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> w(-100, 700), v(-60, 400);
    for (int k = 0; k < 1000; ++k) {
      const double x = w(rng), y = v(rng);
      const double exact = a * x + b * y + c;
      CHECK(bilinear(f, dw, dv, x, y) == Approx(exact).epsilon(1e-12).scale(std::abs(exact) + 1));
    }
  }
}

TEST_CASE("grid specs") {
  const auto sc = build_toy_scenario(1, 0.8, 0.2);
  const auto g = default_grid_spec(sc);
  CHECK(g.weight_segments == 50);
  CHECK(g.weight_step == 50);
  CHECK(g.volume_step == 30e4);
  const auto r = refine(g, 4);
  CHECK(r.weight_segments == 200);
  CHECK(r.weight_step * r.weight_segments == g.weight_step * g.weight_segments);
  auto spec = toy_scenario_spec(1, 0.8, 0.2);
  spec.lattice.reset();
  const auto m = default_grid_spec(Scenario(spec));
  CHECK(m.weight_step * m.weight_segments == Approx(1.6 * sc.capacity_weight()));
}

namespace {

ScenarioSpec aligned_single_type(double cv) {
  ScenarioSpec s;
  s.horizon = 20;
  s.periods = 20;
  BookingType t{"only", 100, cv * 100, 60e4, cv * 60e4, PiecewiseLinearRate::constant(0.4, 20),
                {}};
  t.price = {PiecewiseLinearRate({{0, 4}, {20, 5}}), 5};
  s.types = {t};
  s.capacity = {CapacitySpec::Mode::Absolute, 0, 450, 280e4};
  s.penalty_factor = 1.25;
  s.max_bookings = 100;
  s.lattice = LatticeHint{60, 60, 100, 60e4};
  return s;
}

}  // namespace

TEST_CASE("aligned single-type grid equals the CE model") {
  const Scenario sc(aligned_single_type(0.3));
  const auto grid = std::make_shared<const ValueGrid>(solve_wv_grid(sc));
  const auto ce = solve_ce(sc);
  const auto& idx = *ce.values.index;
  for (int t = 0; t <= sc.periods(); ++t)
    for (int k = 0; k <= 40; ++k) {
      const int x[1] = {k};
      const double want = ce.values.at(t, idx.rank(x));
      CHECK(grid->slice(t)(k, k) == Approx(want).epsilon(1e-9).scale(1));
    }
  WvPolicy wv(grid, sc, 0.0);
  for (int t = 0; t < sc.periods(); ++t)
    for (int k = 0; k <= 30; ++k) {
      const int x[1] = {k};
      CHECK(wv.price(t, x, 0) == Approx(ce.policy->at(t, idx.rank(x), 0)).epsilon(1e-9));
    }
}

TEST_CASE("no arrivals keep the boundary values") {
  auto spec = aligned_single_type(0.2);
  spec.types[0].arrival = PiecewiseLinearRate::constant(0.0, 20);
  spec.eta_override = std::pair{2.0, 3e-4};
  const Scenario sc(spec);
  const auto g = solve_wv_grid(sc);
  for (int t = 0; t < sc.periods(); ++t) CHECK(g.slice(t) == g.slice(sc.periods()));
}

TEST_CASE("theta has no effect when cv = 0") {
  const auto sc = build_toy_scenario(1.25, 0.9, 0.0);
  const auto grid = std::make_shared<const ValueGrid>(solve_wv_grid(sc));
  WvPolicy wv(grid, sc, 0.0), wvs(grid, sc, 0.2);
  const int x[3] = {3, 2, 4};
  for (int t = 0; t < sc.periods(); t += 11)
    for (int i = 0; i < 3; ++i) CHECK(wv.price(t, x, i) == wvs.price(t, x, i));
  const int full[3] = {sc.max_bookings(), 0, 0};
  CHECK(std::isinf(wv.price(0, full, 0)));
}

TEST_CASE("toy grid bounds the optimum") {
  const auto sc = build_toy_scenario(1, 0.8, 0.2);
  CHECK(solve_wv_grid(sc).initial() >= solve_general(sc).values.initial());
}

TEST_CASE("theta search") {
  const ThetaRange range{0.0, 0.3, 0.01};
  CHECK(range.values().size() == 31);
  CHECK(range.values()[4] == 0.04);
  const auto flat = theta_search(range, [](double) { return 10.0; });
  CHECK(flat.best_theta == 0.0);
  for (const auto& p : flat.points) CHECK(p.improvement_pct == 0.0);
  const auto peaked = theta_search(range, [](double th) { return 100 - (th - 0.07) * (th - 0.07); });
  CHECK(peaked.best_theta == Approx(0.07));
  CHECK(peaked.points[7].improvement_pct > 0);
  const auto tie = theta_search(range, [](double th) { return th < 0.1 ? th : 0.1; });
  CHECK(tie.best_theta == Approx(0.1));
}
