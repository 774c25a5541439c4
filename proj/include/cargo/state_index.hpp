#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cargo {

/// Dense enumeration of count vectors x in N^m with |x|_1 <= x_max, in
/// lexicographic order, with combinatorial ranking and a successor table.
class StateIndex {
 public:
  static constexpr std::int64_t kNoSuccessor = -1;

  StateIndex(int num_types, int max_total);

  /// C(x_max + m, m) without building anything; saturates at INT64_MAX.
  static std::int64_t count(int num_types, int max_total);

  int num_types() const { return num_types_; }
  int max_total() const { return max_total_; }
  std::int64_t size() const { return size_; }

  std::span<const int> counts(std::int64_t index) const {
    return {states_.data() + index * num_types_, static_cast<std::size_t>(num_types_)};
  }
  int total(std::int64_t index) const { return totals_[index]; }
  bool at_limit(std::int64_t index) const { return totals_[index] == max_total_; }

  /// Index of x + e_i, or kNoSuccessor when |x|_1 = x_max.
  std::int64_t successor(std::int64_t index, int type) const {
    return successors_[index * num_types_ + type];
  }

  /// Rank of an arbitrary count vector; -1 when outside the enumeration.
  std::int64_t rank(std::span<const int> x) const;

 private:
  // Number of k-vectors with sum <= n.
  std::int64_t block(int k, int n) const { return binom_[k][n]; }

  int num_types_;
  int max_total_;
  std::int64_t size_;
  std::vector<std::vector<std::int64_t>> binom_;
  std::vector<int> states_;
  std::vector<int> totals_;
  std::vector<std::int64_t> successors_;
};

}  // namespace cargo
