#include "cargo/binary_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "cargo/errors.hpp"

namespace cargo {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'R', 'G', 'O', 'P', 'X', '\0'};

struct Header {
  std::uint32_t version = kDumpVersion;
  std::uint32_t kind = 0;
  std::int32_t types = 0;
  std::int32_t periods = 0;
  std::int32_t extent_a = 0;  // x_max, or A for grids
  std::int32_t extent_b = 0;  // B for grids, quantity kind otherwise
  double step_a = 0, step_b = 0;
  double theta = 0;
  std::uint64_t digest = 0;
};

template <typename T>
void put(std::ofstream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
void get(std::ifstream& is, T& value, const std::string& path) {
  if (!is.read(reinterpret_cast<char*>(&value), sizeof value))
    throw FormatError(path + ": truncated dump");
}

void put_block(std::ofstream& os, const double* data, std::uint64_t n) {
  put(os, n);
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

std::vector<double> get_block(std::ifstream& is, const std::string& path, std::uint64_t expect) {
  std::uint64_t n = 0;
  get(is, n, path);
  if (n != expect) throw FormatError(path + ": payload size does not match its header");
  std::vector<double> out(n);
  if (!is.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw FormatError(path + ": truncated dump");
  return out;
}

std::ofstream open_out(const std::string& path, const Header& h) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof kMagic);
  put(os, h.version);
  put(os, h.kind);
  put(os, h.types);
  put(os, h.periods);
  put(os, h.extent_a);
  put(os, h.extent_b);
  put(os, h.step_a);
  put(os, h.step_b);
  put(os, h.theta);
  put(os, h.digest);
  return os;
}

Header read_header(std::ifstream& is, const std::string& path) {
  char magic[sizeof kMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw FormatError(path + ": not a cargoprice dump");
  Header h;
  get(is, h.version, path);
  if (h.version != kDumpVersion)
    throw FormatError(path + ": dump version " + std::to_string(h.version) + ", expected " +
                      std::to_string(kDumpVersion));
  get(is, h.kind, path);
  get(is, h.types, path);
  get(is, h.periods, path);
  get(is, h.extent_a, path);
  get(is, h.extent_b, path);
  get(is, h.step_a, path);
  get(is, h.step_b, path);
  get(is, h.theta, path);
  get(is, h.digest, path);
  return h;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  return is;
}

Header expect(std::ifstream& is, const std::string& path, DumpKind kind, const Scenario& sc) {
  Header h = read_header(is, path);
  if (h.kind != static_cast<std::uint32_t>(kind)) throw FormatError(path + ": unexpected dump kind");
  if (h.digest != sc.digest())
    throw FormatError(path + ": dump was produced for a different scenario");
  if (h.types != sc.num_types() || h.periods != sc.periods())
    throw FormatError(path + ": dimensions do not match the scenario");
  return h;
}

}  // namespace

void write_dump(const std::string& path, const Scenario& sc, const ExactSolution& sol) {
  Header h;
  h.kind = static_cast<std::uint32_t>(DumpKind::Exact);
  h.types = sc.num_types();
  h.periods = sc.periods();
  h.extent_a = sol.values.index->max_total();
  h.digest = sc.digest();
  auto os = open_out(path, h);
  put_block(os, sol.values.values.data(), sol.values.values.size());
  const auto raw = sol.policy->raw();
  put_block(os, raw.data(), raw.size());
  if (!os) throw ConfigError("failed writing " + path);
}

void write_dump(const std::string& path, const Scenario& sc, const QValueTable& q) {
  Header h;
  h.kind = static_cast<std::uint32_t>(DumpKind::Quantity);
  h.types = q.num_types;
  h.periods = q.periods;
  h.extent_a = q.max_total;
  h.extent_b = static_cast<std::int32_t>(q.kind);
  h.digest = sc.digest();
  auto os = open_out(path, h);
  put_block(os, q.values.data(), q.values.size());
  put_block(os, q.prices.data(), q.prices.size());
  if (!os) throw ConfigError("failed writing " + path);
}

void write_dump(const std::string& path, const Scenario& sc, const ValueGrid& g, double theta) {
  Header h;
  h.kind = static_cast<std::uint32_t>(DumpKind::Grid);
  h.types = sc.num_types();
  h.periods = g.periods();
  h.extent_a = g.spec().weight_segments;
  h.extent_b = g.spec().volume_segments;
  h.step_a = g.spec().weight_step;
  h.step_b = g.spec().volume_step;
  h.theta = theta;
  h.digest = sc.digest();
  auto os = open_out(path, h);
  for (int t = 0; t <= g.periods(); ++t) put_block(os, g.slice(t).data(), g.slice(t).size());
  if (!os) throw ConfigError("failed writing " + path);
}

DumpKind peek_dump_kind(const std::string& path) {
  auto is = open_in(path);
  const auto h = read_header(is, path);
  if (h.kind < 1 || h.kind > 3) throw FormatError(path + ": unknown dump kind");
  return static_cast<DumpKind>(h.kind);
}

ExactSolution read_exact_dump(const std::string& path, const Scenario& sc) {
  auto is = open_in(path);
  const auto h = expect(is, path, DumpKind::Exact, sc);
  if (h.extent_a != sc.max_bookings()) throw FormatError(path + ": x_max does not match");
  auto index = make_state_index(sc);
  const std::uint64_t n = static_cast<std::uint64_t>(index->size()) * (sc.periods() + 1);
  const auto values = get_block(is, path, n);
  ValueTable table{index, Eigen::Map<const Eigen::MatrixXd>(values.data(), index->size(),
                                                           sc.periods() + 1)};
  auto policy = std::make_shared<ExactPolicy>(index, sc.periods());
  const auto raw = get_block(is, path, policy->raw().size());
  std::copy(raw.begin(), raw.end(), policy->raw().begin());
  return {std::move(table), std::move(policy)};
}

QValueTable read_quantity_dump(const std::string& path, const Scenario& sc) {
  auto is = open_in(path);
  const auto h = expect(is, path, DumpKind::Quantity, sc);
  QValueTable q;
  q.kind = static_cast<QuantityKind>(h.extent_b);
  q.max_total = h.extent_a;
  q.num_types = h.types;
  q.periods = h.periods;
  const auto values =
      get_block(is, path, static_cast<std::uint64_t>(q.max_total + 1) * (q.periods + 1));
  q.values = Eigen::Map<const Eigen::MatrixXd>(values.data(), q.max_total + 1, q.periods + 1);
  q.prices = get_block(is, path,
                       static_cast<std::uint64_t>(q.periods) * (q.max_total + 1) * q.num_types);
  return q;
}

std::pair<ValueGrid, double> read_grid_dump(const std::string& path, const Scenario& sc) {
  auto is = open_in(path);
  const auto h = expect(is, path, DumpKind::Grid, sc);
  ValueGrid g(GridSpec{h.extent_a, h.extent_b, h.step_a, h.step_b}, h.periods);
  for (int t = 0; t <= h.periods; ++t) {
    const auto data = get_block(is, path, g.slice(t).size());
    g.slice(t) = Eigen::Map<const Eigen::MatrixXd>(data.data(), h.extent_a + 1, h.extent_b + 1);
  }
  return {std::move(g), h.theta};
}

std::shared_ptr<const PricingPolicy> read_policy_dump(const std::string& path,
                                                      const Scenario& sc) {
  switch (peek_dump_kind(path)) {
    case DumpKind::Exact:
      return read_exact_dump(path, sc).policy;
    case DumpKind::Quantity:
      return std::make_shared<QuantityPolicy>(
          std::make_shared<const QValueTable>(read_quantity_dump(path, sc)));
    case DumpKind::Grid: {
      auto [grid, theta] = read_grid_dump(path, sc);
      return std::make_shared<WvPolicy>(std::make_shared<const ValueGrid>(std::move(grid)), sc,
                                        theta);
    }
  }
  throw FormatError(path + ": unknown dump kind");
}

}  // namespace cargo
