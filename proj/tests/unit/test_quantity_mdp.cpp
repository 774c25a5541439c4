#include <doctest.h>

#include <cmath>

#include "cargo/exact_mdp.hpp"
#include "cargo/quantity_mdp.hpp"

using namespace cargo;
using doctest::Approx;

TEST_CASE("pooled distribution") {
  const auto sc = build_toy_scenario(1, 0.8, 0.3);
  const auto p = pool_types(sc);
  const double total = 6.5 + 4.0625 + 4.875;
  CHECK(p.mix[0] == Approx(6.5 / total));
  CHECK(p.mix[0] + p.mix[1] + p.mix[2] == Approx(1.0).epsilon(1e-15));
  const double w[3] = {100, 75, 150};
  double ws = 0, var = 0, qs = 0;
  for (int i = 0; i < 3; ++i) ws += p.mix[i] * w[i];
  for (int i = 0; i < 3; ++i) var += p.mix[i] * (0.09 * w[i] * w[i] + (w[i] - ws) * (w[i] - ws));
  for (int i = 0; i < 3; ++i) qs += p.mix[i] * sc.chargeable(i);
  CHECK(p.weight_mean == Approx(ws).epsilon(1e-14));
  CHECK(p.weight_sd == Approx(std::sqrt(var)).epsilon(1e-14));
  CHECK(p.chargeable == Approx(qs).epsilon(1e-14));
}

TEST_CASE("a single type aggregates losslessly") {
  auto spec = toy_scenario_spec(1.25, 0.9, 0.3);
  spec.types.resize(1);
  const Scenario sc(spec);
  const auto pq = solve_pq(sc);
  const auto opt = solve_general(sc);
  CHECK(pq.values(0, 0) == Approx(opt.values.initial()).epsilon(1e-8));
  CHECK(solve_aq(sc).values(0, 0) == Approx(pq.values(0, 0)).epsilon(1e-12));
}

TEST_CASE("identical types make AQ and PQ coincide") {
  auto spec = toy_scenario_spec(1, 0.8, 0.2);
  for (auto& t : spec.types) {
    t.weight_mean = 100;
    t.volume_mean = 60e4;
    t.weight_sd = 20;
    t.volume_sd = 12e4;
  }
  const Scenario sc(spec);
  const auto pq = solve_pq(sc), aq = solve_aq(sc);
  CHECK((pq.values - aq.values).cwiseAbs().maxCoeff() <= 1e-9 * std::abs(pq.values(0, 0)));
}

TEST_CASE("PQ structure holds and the detector finds faults") {
  const auto sc = build_toy_scenario(1.5, 0.8, 0.5);
  auto pq = solve_pq(sc);
  const auto rep = check_pq_structure(pq, sc);
  CHECK(rep.ok());
  CHECK_FALSE(rep.checked_price_time);

  // Largest PQ price in each column sits just below the count limit.
  for (int t = 0; t < pq.periods; t += 17)
    for (int i = 0; i < pq.num_types; ++i)
      for (int x = 0; x < pq.max_total - 1; ++x)
        CHECK(pq.price(t, x, i) <= pq.price(t, pq.max_total - 1, i) * (1 + 1e-9));

  pq.values(7, 100) += 50.0;
  const auto bad = check_pq_structure(pq, sc);
  REQUIRE_FALSE(bad.ok());
  bool found = false;
  for (const auto& v : bad.violations)
    if (v.period == 100 && (v.total == 6 || v.total == 7 || v.total == 8)) found = true;
  CHECK(found);
}

TEST_CASE("time-homogeneous prices fall over time") {
  const Scenario sc(time_homogeneous_variant(toy_scenario_spec(1.25, 0.9, 0.3)));
  CHECK(is_time_homogeneous(sc));
  const auto rep = check_pq_structure(solve_pq(sc), sc);
  CHECK(rep.checked_price_time);
  CHECK(rep.ok());
}

TEST_CASE("monotone pruning reproduces the plain solve") {
  const auto sc = build_toy_scenario(1, 1.1, 0.5);
  const auto plain = solve_pq(sc);
  const auto pruned = solve_pq(sc, QuantityOptions{true});
  CHECK((plain.values - pruned.values).cwiseAbs().maxCoeff() <= 1e-9 * plain.values(0, 0));
  for (std::size_t k = 0; k < plain.prices.size(); ++k)
    if (std::isfinite(plain.prices[k]))
      CHECK(pruned.prices[k] == Approx(plain.prices[k]).epsilon(1e-9));
}

TEST_CASE("quantity policy") {
  const auto sc = build_toy_scenario(1, 0.8, 0.2);
  auto table = std::make_shared<const QValueTable>(solve_pq(sc));
  QuantityPolicy p(table);
  const int x[3] = {2, 1, 0};
  CHECK(p.price(4, x, 1) == table->price(4, 3, 1));
  const int full[3] = {sc.max_bookings(), 0, 0};
  CHECK(std::isinf(p.price(4, full, 0)));
  CHECK(max_price_residual(sc, *table) <= 1e-9);
  CHECK(max_price_residual(sc, solve_aq(sc)) <= 1e-9);
}
