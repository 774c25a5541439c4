#pragma once

// Versioned little-endian dumps of solved tables so policies can be simulated
// or compared later. Every file carries the scenario digest and is rejected
// when loaded against a different scenario.

#include <cstdint>
#include <memory>
#include <string>

#include "cargo/exact_mdp.hpp"
#include "cargo/quantity_mdp.hpp"
#include "cargo/wv_grid.hpp"

namespace cargo {

inline constexpr std::uint32_t kDumpVersion = 1;

enum class DumpKind : std::uint32_t { Exact = 1, Quantity = 2, Grid = 3 };

void write_dump(const std::string& path, const Scenario& scenario, const ExactSolution& solution);
void write_dump(const std::string& path, const Scenario& scenario, const QValueTable& table);
void write_dump(const std::string& path, const Scenario& scenario, const ValueGrid& grid,
                double theta);

DumpKind peek_dump_kind(const std::string& path);

ExactSolution read_exact_dump(const std::string& path, const Scenario& scenario);
QValueTable read_quantity_dump(const std::string& path, const Scenario& scenario);
/// Grid plus the theta stored with it.
std::pair<ValueGrid, double> read_grid_dump(const std::string& path, const Scenario& scenario);

/// Whatever policy the dump holds, ready to simulate. Throws FormatError on a
/// bad header, a version or digest mismatch, or a truncated payload.
std::shared_ptr<const PricingPolicy> read_policy_dump(const std::string& path,
                                                      const Scenario& scenario);

}  // namespace cargo
