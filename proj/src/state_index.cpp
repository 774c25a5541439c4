#include "cargo/state_index.hpp"

#include <limits>
#include <numeric>

#include "cargo/errors.hpp"

namespace cargo {

std::int64_t StateIndex::count(int m, int n) {
  // C(n + m, m) computed incrementally; exact while it fits.
  long double c = 1;
  for (int k = 1; k <= m; ++k) {
    c = c * (n + k) / k;
    if (c > static_cast<long double>(std::numeric_limits<std::int64_t>::max()))
      return std::numeric_limits<std::int64_t>::max();
  }
  return static_cast<std::int64_t>(c + 0.5L);
}

StateIndex::StateIndex(int num_types, int max_total)
    : num_types_(num_types), max_total_(max_total), size_(count(num_types, max_total)) {
  if (num_types < 1 || max_total < 0) throw DomainError("invalid state index dimensions");
  if (size_ > 200'000'000) throw CapacityError("state enumeration too large");

  // binom_[k][n] = C(n + k, k), number of k-vectors with sum <= n.
  binom_.assign(num_types + 1, std::vector<std::int64_t>(max_total + 1, 1));
  for (int k = 1; k <= num_types; ++k)
    for (int n = 1; n <= max_total; ++n) binom_[k][n] = binom_[k][n - 1] + binom_[k - 1][n];

  states_.resize(static_cast<std::size_t>(size_) * num_types);
  totals_.resize(size_);
  std::vector<int> x(num_types, 0);
  std::int64_t idx = 0;
  int sum = 0;
  // Odometer over the simplex in lexicographic order (last coordinate fastest).
  while (true) {
    std::copy(x.begin(), x.end(), states_.begin() + idx * num_types);
    totals_[idx] = sum;
    ++idx;
    int pos = num_types - 1;
    while (pos >= 0 && sum == max_total) {
      sum -= x[pos];
      x[pos] = 0;
      --pos;
      if (pos < 0) break;
    }
    if (pos < 0) break;
    ++x[pos];
    ++sum;
  }
  if (idx != size_) throw NumericalError("state enumeration count mismatch");

  successors_.resize(static_cast<std::size_t>(size_) * num_types);
  for (std::int64_t s = 0; s < size_; ++s) {
    std::vector<int> y(states_.begin() + s * num_types, states_.begin() + (s + 1) * num_types);
    for (int i = 0; i < num_types; ++i) {
      if (totals_[s] == max_total) {
        successors_[s * num_types + i] = kNoSuccessor;
        continue;
      }
      ++y[i];
      successors_[s * num_types + i] = rank(y);
      --y[i];
    }
  }
}

std::int64_t StateIndex::rank(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != num_types_) return -1;
  int remaining = max_total_;
  std::int64_t r = 0;
  for (int j = 0; j < num_types_; ++j) {
    if (x[j] < 0 || x[j] > remaining) return -1;
    const int tail = num_types_ - j - 1;
    // Vectors sharing the prefix with a smaller j-th coordinate v.
    for (int v = 0; v < x[j]; ++v) r += block(tail, remaining - v);
    remaining -= x[j];
  }
  return r;
}

}  // namespace cargo
