#include "cargo/policy.hpp"

#include <cmath>
#include <sstream>

#include "cargo/errors.hpp"
#include "cargo/parallel.hpp"

namespace cargo {

TabulatedPolicy::TabulatedPolicy(std::shared_ptr<const StateIndex> index, int periods)
    : index_(std::move(index)),
      periods_(periods),
      table_(static_cast<std::size_t>(periods) * index_->size() * index_->num_types(),
             kRejectPrice) {}

double TabulatedPolicy::price(int period, std::span<const int> counts, int type) const {
  const auto s = index_->rank(counts);
  if (s < 0 || period < 0 || period >= periods_) {
    std::ostringstream os;
    os << "tabulated policy has no entry for period " << period << ", type " << type
       << ", state outside the enumeration";
    throw PolicyError(os.str());
  }
  return at(period, s, type);
}

void TabulatedPolicy::prices(int period, std::span<const int> counts, std::span<double> out) const {
  const auto s = index_->rank(counts);
  if (s < 0 || period < 0 || period >= periods_)
    throw PolicyError("tabulated policy has no entry for period " + std::to_string(period));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(period, s, static_cast<int>(i));
}

TabulatedPolicy tabulate(const PricingPolicy& policy, std::shared_ptr<const StateIndex> index,
                         int periods) {
  TabulatedPolicy out(index, periods);
  const int m = index->num_types();
  const std::int64_t n = index->size();
  for (int t = 0; t < periods; ++t) {
    parallel_for(n, [&](std::int64_t s) {
      if (index->at_limit(s)) return;
      thread_local std::vector<double> buf;
      buf.resize(m);
      policy.prices(t, index->counts(s), buf);
      for (int i = 0; i < m; ++i) out.at(t, s, i) = buf[i];
    });
  }
  return out;
}

}  // namespace cargo
