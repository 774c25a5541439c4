#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cargo/errors.hpp"
#include "cargo/price_root.hpp"
#include "oracles.hpp"

using namespace cargo;
using doctest::Approx;

namespace {

// r - alpha^beta / (beta r^(beta-1)) - c+/Q, written independently of the library.
double residual(double a, double b, double c, double q, double r) {
  return r - std::pow(a, b) / (b * std::pow(r, b - 1)) - std::max(c, 0.0) / q;
}

double gain(double a, double b, double c, double q, double m, double r) {
  return m * std::exp(-std::pow(r / a, b)) * (r * q - c);
}

}  // namespace

TEST_CASE("zero opportunity cost gives the monopoly price") {
  const auto s = solve_price({4, 5, 0, 1, 0.1});
  CHECK(s.price == Approx(4 * std::pow(5.0, -0.2)).epsilon(1e-12));
  CHECK(s.price == Approx(2.8991).epsilon(1e-4));
  const double ref = oracle::bisect([](double r) { return residual(4, 5, 0, 1, r); }, 1e-6, 40);
  CHECK(s.price == Approx(ref).epsilon(1e-10));
}

TEST_CASE("exponential reservation prices") {
  CHECK(solve_price({2.5, 1, 0, 3, 0.2}).price == Approx(2.5).epsilon(1e-12));
  CHECK(solve_price({2.5, 1, 6, 3, 0.2}).price == Approx(4.5).epsilon(1e-12));
}

TEST_CASE("large opportunity cost") {
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {1e2, 1e3, 1e4, 1e6}) {
    const auto s = solve_price({4, 5, c, 1, 0.1});
    const double excess = s.price - c;
    CHECK(excess >= 0);
    CHECK(excess <= prev);
    prev = excess;
  }
  CHECK(prev < 1e-10 * 1e6);
  const auto out = solve_price({4, 5, std::numeric_limits<double>::infinity(), 1, 0.1});
  CHECK(std::isinf(out.price));
  CHECK(out.gain == 0.0);
}

TEST_CASE("negative opportunity cost is clamped for the price only") {
  const auto s = solve_price({4, 5, -3, 2, 0.1});
  CHECK(s.price == Approx(4 * std::pow(5.0, -0.2)).epsilon(1e-12));
  CHECK(s.gain == Approx(gain(4, 5, -3, 2, 0.1, s.price)).epsilon(1e-12));
}

TEST_CASE("invalid problems") {
  CHECK_THROWS_AS(solve_price({4, 0.5, 0, 1, 0.1}), DomainError);
  CHECK_THROWS_AS(solve_price({0, 5, 0, 1, 0.1}), DomainError);
  CHECK_THROWS_AS(solve_price({4, 5, 0, 0, 0.1}), DomainError);
  CHECK_THROWS_AS(solve_price({4, 5, 0, 1, 1.5}), DomainError);
}

TEST_CASE("randomized residuals, bracket and monotonicity") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> alpha(0.5, 10), beta(1, 8), c(-50, 3000), q(10, 500);
  for (int k = 0; k < 500; ++k) {
    const double a = alpha(rng), b = beta(rng), cc = c(rng), qq = q(rng);
    const auto s = solve_price({a, b, cc, qq, 0.05});
    CHECK(std::abs(residual(a, b, cc, qq, s.price)) <= kPriceTolerance * std::max(1.0, s.price));
    CHECK(s.price >= std::max(cc, 0.0) / qq);
    // Comparative statics in c and alpha.
    CHECK(solve_price({a, b, cc + 10, qq, 0.05}).price >= s.price - 1e-9 * s.price);
    CHECK(solve_price({a * 1.1, b, cc, qq, 0.05}).price >= s.price - 1e-9 * s.price);
    // A valid lower hint changes nothing beyond tolerance.
    const auto hinted = solve_price({a, b, cc, qq, 0.05}, 0.5 * s.price);
    CHECK(hinted.price == Approx(s.price).epsilon(1e-9));
  }
}

TEST_CASE("gain equals the exhaustive grid maximum") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> alpha(1, 6), beta(1, 6), c(0, 400), q(50, 150);
  for (int k = 0; k < 20; ++k) {
    const double a = alpha(rng), b = beta(rng), cc = c(rng), qq = q(rng), m = 0.07;
    const auto s = solve_price({a, b, cc, qq, m});
    double best = -std::numeric_limits<double>::infinity();
    for (double r = 0; r <= 10 * a; r += 1e-4 * a) best = std::max(best, gain(a, b, cc, qq, m, r));
    CHECK(s.gain == Approx(best).epsilon(1e-6));
    CHECK(s.gain >= best - 1e-12);
  }
}
