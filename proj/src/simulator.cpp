#include "cargo/simulator.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "cargo/errors.hpp"
#include "cargo/parallel.hpp"

namespace cargo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum Stream : std::uint64_t { kArrival = 1, kReservation = 2, kWeightVolume = 3 };

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t path, Stream stream, bool mirror)
      : engine_(splitmix64(seed ^ splitmix64(path * 4 + stream))), mirror_(mirror) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return mirror_ ? std::nextafter(1.0 - u, 0.0) : u;
  }
  double normal() {
    const double z = normal_(engine_);
    return mirror_ ? -z : z;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  bool mirror_;
};

struct TraceRow {
  int period, type;
  double price, rp;
  bool accepted;
  double w, v;
};

struct Replication {
  double revenue = 0;
  int accepted = 0;
  int negative = 0;
  bool overbooked = false;
  std::vector<std::int64_t> by_type;
  std::vector<TraceRow> trace;
};

std::string describe(std::span<const int> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < x.size(); ++k) os << (k ? "," : "") << x[k];
  os << ")";
  return os.str();
}

}  // namespace

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += v[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

SimulationReport simulate(const Scenario& sc, const PricingPolicy& policy,
                          const SimulationConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  if (cfg.antithetic && cfg.replications % 2 != 0)
    throw ConfigError("antithetic sampling needs an even replication count");

  const int m = sc.num_types();
  const int T = sc.periods();
  const int x_max = sc.max_bookings();
  const bool tracing = !cfg.trace_path.empty();

  Eigen::MatrixXd cumulative(T, m);
  Eigen::MatrixXd scale(T, m);
  for (int t = 0; t < T; ++t) {
    double acc = 0.0;
    const double s = (t + (cfg.scale_at_midpoint ? 0.5 : 0.0)) * sc.period_length();
    for (int i = 0; i < m; ++i) {
      acc += sc.arrival_mass(t, i);
      cumulative(t, i) = acc;
      scale(t, i) = cfg.scale_at_midpoint ? sc.type(i).price.scale(s) : sc.price_scale(t, i);
    }
  }

  std::vector<Replication> reps(cfg.replications);
  auto run = [&](std::int64_t r) {
    const std::uint64_t path = cfg.antithetic ? r / 2 : r;
    const bool mirror = cfg.antithetic && (r % 2 == 1);
    Draws arrival(cfg.seed, path, kArrival, mirror);
    Draws reservation(cfg.seed, path, kReservation, mirror);
    Draws size(cfg.seed, path, kWeightVolume, mirror);

    Replication& out = reps[r];
    out.by_type.assign(m, 0);
    std::vector<int> x(m, 0);
    int total = 0;
    double W = 0.0, V = 0.0;
    for (int t = 0; t < T; ++t) {
      const double u = arrival.uniform();
      int i = 0;
      while (i < m && u >= cumulative(t, i)) ++i;
      if (i == m) continue;
      const auto& type = sc.type(i);
      const double rp =
          scale(t, i) * std::pow(-std::log1p(-reservation.uniform()), 1.0 / type.price.shape);
      const double w = type.weight_mean + type.weight_sd * size.normal();
      const double v = type.volume_mean + type.volume_sd * size.normal();
      double r_price = kRejectPrice;
      if (total < x_max) {
        r_price = policy.price(t, x, i);
        if (std::isnan(r_price)) {
          std::ostringstream os;
          os << "policy has no price at period " << t << ", state " << describe(x) << ", type "
             << i << " (replication " << r << ")";
          throw PolicyError(os.str());
        }
      }
      const bool accept = std::isfinite(r_price) && rp >= r_price;
      if (accept) {
        out.revenue += r_price * std::max(w, v / sc.gamma());
        W += w;
        V += v;
        ++x[i];
        ++total;
        ++out.accepted;
        ++out.by_type[i];
        if (w < 0 || v < 0) ++out.negative;
      }
      if (tracing) out.trace.push_back({t, i, r_price, rp, accept, w, v});
    }
    out.revenue -= sc.terminal_penalty(W, V);
    out.overbooked = W > sc.capacity_weight() || V > sc.capacity_volume();
  };
  if (tracing) {
    for (std::int64_t r = 0; r < cfg.replications; ++r) run(r);
  } else {
    parallel_for(cfg.replications, run);
  }

  SimulationReport rep;
  rep.replications = cfg.replications;
  rep.accepted.assign(m, 0);
  rep.revenues.resize(cfg.replications);
  rep.acceptances.resize(cfg.replications);
  std::int64_t over = 0, negative = 0, accepted = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int r = 0; r < cfg.replications; ++r) {
    const auto& x = reps[r];
    rep.revenues[r] = x.revenue;
    rep.acceptances[r] = x.accepted;
    for (int i = 0; i < m; ++i) rep.accepted[i] += x.by_type[i];
    over += x.overbooked;
    negative += x.negative;
    accepted += x.accepted;
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x.revenue, sizeof bytes);
    for (unsigned char b : bytes) h = (h ^ b) * 0x100000001b3ULL;
  }
  rep.digest = h;
  rep.overbooking_frequency = static_cast<double>(over) / cfg.replications;
  rep.negative_draw_frequency = accepted ? static_cast<double>(negative) / accepted : 0.0;

  // Antithetic pairs are averaged first so the SE reflects their correlation.
  std::vector<double> samples;
  if (cfg.antithetic) {
    samples.resize(cfg.replications / 2);
    for (std::size_t k = 0; k < samples.size(); ++k)
      samples[k] = 0.5 * (rep.revenues[2 * k] + rep.revenues[2 * k + 1]);
  } else {
    samples = rep.revenues;
  }
  const std::size_t n = samples.size();
  rep.mean = pairwise_sum(samples.data(), n) / n;
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) sq[k] = (samples[k] - rep.mean) * (samples[k] - rep.mean);
    rep.standard_error = std::sqrt(pairwise_sum(sq.data(), n) / (n - 1) / n);
  }

  if (tracing) {
    std::ofstream os(cfg.trace_path);
    if (!os) throw ConfigError("cannot open trace file " + cfg.trace_path);
    os << "replication,period,type,price,rp,accepted,w,v\n" << std::setprecision(17);
    for (int r = 0; r < cfg.replications; ++r)
      for (const auto& row : reps[r].trace)
        os << r << ',' << row.period << ',' << row.type << ',' << row.price << ',' << row.rp
           << ',' << (row.accepted ? 1 : 0) << ',' << row.w << ',' << row.v << '\n';
  }
  return rep;
}

}  // namespace cargo
