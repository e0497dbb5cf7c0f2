#include "lbs/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lbs/errors.hpp"

namespace lbs {

using nlohmann::json;

std::vector<double> PriceGenerator::generate(std::size_t steps) const {
  if (kind == Kind::Constant) {
    if (!(p0 > 0.0)) throw ValidationError("constant price must be positive");
    return std::vector<double>(steps, p0);
  }
  const PriceBatch batch = build_batch(mu, sigma, p0, t_max, dt, paths, seed);
  return subsample(batch.averaged, steps);
}

namespace {

template <typename T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  return field<T>(doc, key);
}

PriceGenerator parse_generator(const json& doc) {
  if (!doc.is_object()) throw ValidationError("'generator' must be an object");
  PriceGenerator gen;
  const auto type = field_or<std::string>(doc, "type", "gbm");
  if (type == "constant") {
    gen.kind = PriceGenerator::Kind::Constant;
  } else if (type == "gbm") {
    gen.kind = PriceGenerator::Kind::Gbm;
  } else {
    throw ValidationError("unknown generator type '" + type + "'");
  }
  gen.p0 = field_or<double>(doc, "p0", gen.p0);
  gen.mu = field_or<double>(doc, "mu", gen.mu);
  gen.sigma = field_or<double>(doc, "sigma", gen.sigma);
  gen.t_max = field_or<std::size_t>(doc, "T_max", gen.t_max);
  gen.dt = field_or<double>(doc, "dt", gen.dt);
  gen.paths = field_or<std::size_t>(doc, "paths", gen.paths);
  gen.seed = field_or<std::uint64_t>(doc, "seed", gen.seed);
  return gen;
}

json generator_to_json(const PriceGenerator& gen) {
  if (gen.kind == PriceGenerator::Kind::Constant) return {{"type", "constant"}, {"p0", gen.p0}};
  json doc = {{"type", "gbm"},     {"p0", gen.p0},       {"mu", gen.mu},
              {"sigma", gen.sigma}, {"T_max", gen.t_max}, {"paths", gen.paths},
              {"seed", gen.seed}};
  if (gen.dt > 0.0) doc["dt"] = gen.dt;
  return doc;
}

}  // namespace

Instance InstanceSpec::build() const {
  std::vector<double> p;
  if (prices) {
    p = *prices;
  } else if (generator) {
    p = generator->generate(steps);
  } else {
    throw ValidationError("instance needs either 'prices' or 'generator'");
  }
  if (p.size() != steps)
    throw ValidationError("'prices' has " + std::to_string(p.size()) + " entries but T = " +
                          std::to_string(steps));
  return make_instance(block, std::move(p), params);
}

InstanceSpec parse_instance_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("instance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("instance JSON must be an object");

  InstanceSpec spec;
  const auto steps = field<std::int64_t>(doc, "T");
  spec.block = field<std::int64_t>(doc, "N");
  if (steps <= 0) throw ValidationError("T must be positive");
  spec.steps = static_cast<std::size_t>(steps);
  spec.params.beta = field_or<double>(doc, "beta", spec.params.beta);
  spec.params.prototype = parse_prototype(field_or<std::string>(doc, "prototype", "arctan"));
  spec.params.threshold = field_or<double>(doc, "H", spec.params.threshold);
  if (doc.contains("L") && !doc["L"].is_null()) spec.params.level = field<double>(doc, "L");
  if (doc.contains("eta") && !doc["eta"].is_null()) spec.params.eta = field<double>(doc, "eta");
  if (doc.contains("prices") && !doc["prices"].is_null())
    spec.prices = field<std::vector<double>>(doc, "prices");
  if (doc.contains("generator") && !doc["generator"].is_null())
    spec.generator = parse_generator(doc["generator"]);
  return spec;
}

std::string instance_spec_to_json(const InstanceSpec& spec) {
  json doc = {{"T", spec.steps},
              {"N", spec.block},
              {"beta", spec.params.beta},
              {"prototype", std::string(to_string(spec.params.prototype))},
              {"H", spec.params.threshold}};
  doc["L"] = spec.params.level ? json(*spec.params.level) : json(nullptr);
  if (spec.params.eta) doc["eta"] = *spec.params.eta;
  if (spec.prices) doc["prices"] = *spec.prices;
  if (spec.generator) doc["generator"] = generator_to_json(*spec.generator);
  return doc.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

Instance load_instance_file(const std::string& path) {
  return parse_instance_spec(read_text_file(path)).build();
}

std::string result_to_json(const SolveResult& result) {
  nlohmann::ordered_json doc;
  doc["algorithm"] = result.algorithm;
  if (result.schedule) {
    doc["x"] = result.schedule->x;
    doc["value"] = result.schedule->value;
  } else {
    doc["x"] = nullptr;
    doc["value"] = nullptr;
  }
  doc["wall_ms"] = result.wall_ms;
  doc["status"] = std::string(to_string(result.status));
  if (result.status == SolveStatus::DncTime) doc["reason"] = "time_limit";
  if (result.status == SolveStatus::DncMemory) doc["reason"] = "memory_limit";
  if (result.stage1_value) doc["stage1_value"] = *result.stage1_value;
  return doc.dump();
}

std::string bound_to_json(const BoundReport& bound, double wall_ms) {
  nlohmann::ordered_json doc = {{"algorithm", "upper-bound"},
                                {"x", nullptr},
                                {"value", bound.ub},
                                {"wall_ms", wall_ms},
                                {"status", "bound"},
                                {"pbar", bound.pbar},
                                {"cunder", bound.cunder},
                                {"convexity_ok", bound.convexity_ok}};
  return doc.dump();
}

}  // namespace lbs
