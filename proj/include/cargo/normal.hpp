#pragma once

// Scalar kernels for normal distributions. Templated on the floating type so the
// same code serves double and long double oracles in tests.

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cargo {

template <typename Scalar>
Scalar normal_pdf(Scalar z) {
  return std::exp(-Scalar(0.5) * z * z) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
Scalar normal_cdf(Scalar z) {
  return Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

// psi(d) = phi(d) + d * Phi(d), i.e. E[(Z + d)^+] for standard normal Z.
// The left tail uses the Laplace continued fraction to avoid cancellation.
template <typename Scalar>
Scalar standard_partial_expectation(Scalar d) {
  if (d > Scalar(-3)) return normal_pdf(d) + d * normal_cdf(d);
  const Scalar y = -d;
  // K = 1 / (y + 2 / (y + 3 / (y + ...))), then psi = phi(y) * K / (y + K).
  Scalar tail = y;
  for (int k = 80; k >= 2; --k) tail = y + Scalar(k) / tail;
  const Scalar kk = Scalar(1) / tail;
  return normal_pdf(y) * kk / (y + kk);
}

// E[(S - C)^+] for S ~ Normal(mean, sd).
template <typename Scalar>
Scalar normal_partial_expectation(Scalar mean, Scalar sd, Scalar threshold) {
  if (sd <= Scalar(0)) return std::max(mean - threshold, Scalar(0));
  return sd * standard_partial_expectation((mean - threshold) / sd);
}

// E[max(X, Y)] for independent normals X, Y (Clark's formula).
template <typename Scalar>
Scalar expected_max_of_normals(Scalar mean_x, Scalar sd_x, Scalar mean_y, Scalar sd_y) {
  const Scalar spread = std::hypot(sd_x, sd_y);
  if (spread <= Scalar(0)) return std::max(mean_x, mean_y);
  const Scalar d = (mean_x - mean_y) / spread;
  return mean_x * normal_cdf(d) + mean_y * normal_cdf(-d) + spread * normal_pdf(d);
}

}  // namespace cargo
