#include "cargo/scenario_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cargo/errors.hpp"

namespace cargo {

namespace {

using nlohmann::json;

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

PiecewiseLinearRate knots(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected [[s, value], ...]");
  std::vector<PiecewiseLinearRate::Knot> out;
  for (const auto& k : j) {
    if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
      throw ConfigError(where + ": every knot must be [s, value]");
    out.push_back({k[0].get<double>(), k[1].get<double>()});
  }
  try {
    return PiecewiseLinearRate(std::move(out));
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario JSON must be an object");

  ScenarioSpec spec;
  spec.name = doc.value("name", name);
  spec.horizon = number(doc, "L", "scenario");
  const double periods = number(doc, "periods", "scenario");
  if (periods < 1 || periods != std::floor(periods))
    throw ConfigError("scenario: 'periods' must be a positive integer");
  spec.periods = static_cast<int>(periods);
  spec.gamma = number_or(doc, "gamma", 6000.0, "scenario");

  double weight_unit = 1.0, volume_unit = 1.0;
  if (doc.contains("units")) {
    weight_unit = number_or(doc["units"], "weight", 1.0, "units");
    volume_unit = number_or(doc["units"], "volume", 1.0, "units");
  }

  if (!doc.contains("capacity")) throw ConfigError("scenario: missing 'capacity'");
  const auto& cap = doc["capacity"];
  const std::string mode = cap.value("mode", "ratio");
  if (mode == "ratio") {
    spec.capacity = {CapacitySpec::Mode::Ratio, number(cap, "c_over_d", "capacity"), 0, 0};
  } else if (mode == "absolute") {
    spec.capacity = {CapacitySpec::Mode::Absolute, 0, number(cap, "c_w", "capacity") * weight_unit,
                     number(cap, "c_v", "capacity") * volume_unit};
  } else {
    throw ConfigError("capacity: mode must be \"ratio\" or \"absolute\"");
  }

  spec.penalty_factor =
      doc.contains("penalty") ? number_or(doc["penalty"], "pf", 1.0, "penalty") : 1.0;
  if (doc.contains("x_max")) spec.max_bookings = static_cast<int>(number(doc, "x_max", "scenario"));
  if (doc.contains("eta")) {
    const auto& e = doc["eta"];
    spec.eta_override = std::pair{number(e, "weight", "eta"), number(e, "volume", "eta")};
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    LatticeHint hint;
    hint.weight_segments = static_cast<int>(number_or(g, "A", 50, "grid"));
    hint.volume_segments = static_cast<int>(number_or(g, "B", 50, "grid"));
    hint.weight_step = number_or(g, "dw", 0.0, "grid") * weight_unit;
    hint.volume_step = number_or(g, "dv", 0.0, "grid") * volume_unit;
    spec.lattice = hint;
  }

  if (!doc.contains("types") || !doc["types"].is_array() || doc["types"].empty())
    throw ConfigError("scenario: 'types' must be a non-empty array");
  int k = 0;
  for (const auto& tj : doc["types"]) {
    const std::string where = "types[" + std::to_string(k++) + "]";
    BookingType t;
    t.label = tj.value("label", where);
    t.weight_mean = number(tj, "weight_mean", where) * weight_unit;
    t.volume_mean = number(tj, "volume_mean", where) * volume_unit;
    if (tj.contains("cv")) {
      const double cv = number(tj, "cv", where);
      t.weight_sd = cv * t.weight_mean;
      t.volume_sd = cv * t.volume_mean;
    } else {
      t.weight_sd = number(tj, "weight_sd", where) * weight_unit;
      t.volume_sd = number(tj, "volume_sd", where) * volume_unit;
    }
    if (!tj.contains("arrival")) throw ConfigError(where + ": missing 'arrival'");
    t.arrival = knots(tj["arrival"], where + ".arrival");
    if (!tj.contains("price")) throw ConfigError(where + ": missing 'price'");
    t.price.scale = knots(tj["price"].value("scale", json()), where + ".price.scale");
    t.price.shape = number(tj["price"], "shape", where + ".price");
    spec.types.push_back(std::move(t));
  }
  return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_scenario(buf.str(), std::filesystem::path(path).stem().string());
}

bool is_builtin_scenario(const std::string& source) {
  return source == "toy-m3" || source == "real-m27";
}

ScenarioSpec resolve_scenario(const std::string& source, const ScenarioFactors& f) {
  if (is_builtin_scenario(source))
    return builtin_scenario_spec(source, f.pf.value_or(1.0), f.c_over_d.value_or(0.8),
                                 f.cv.value_or(0.2));
  ScenarioSpec spec = load_scenario_file(source);
  if (f.pf) spec.penalty_factor = *f.pf;
  if (f.c_over_d) spec.capacity = {CapacitySpec::Mode::Ratio, *f.c_over_d, 0, 0};
  if (f.cv) apply_cv(spec.types, *f.cv);
  return spec;
}

}  // namespace cargo
