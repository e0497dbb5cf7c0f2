#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbs/bounds.hpp"
#include "lbs/model.hpp"
#include "lbs/prices.hpp"
#include "lbs/solver.hpp"

namespace lbs {

/// Price source embedded in an instance document under "generator".
///   {"type": "constant", "p0": 100}
///   {"type": "gbm", "mu": 0, "sigma": 0.25, "p0": 100, "T_max": 1000,
///    "dt": 0.001, "paths": 10, "seed": 7}
/// GBM batches are averaged over `paths` and subsampled down to T.
struct PriceGenerator {
  enum class Kind { Constant, Gbm } kind = Kind::Constant;
  double p0 = 100.0;
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t t_max = 1000;
  double dt = 0.0;  // 0 selects 1 / t_max
  std::size_t paths = 10;
  std::uint64_t seed = 0;

  std::vector<double> generate(std::size_t steps) const;
};

/// Parsed instance document:
///   {"T", "N", "beta", "prototype", "H", "L", "prices" | "generator"}
/// beta, prototype, H and L default to 0.9, "arctan", 0.99 and N; an explicit
/// "eta" bypasses calibration.
struct InstanceSpec {
  std::size_t steps = 0;
  Quantity block = 0;
  InstanceParams params;
  std::optional<std::vector<double>> prices;
  std::optional<PriceGenerator> generator;

  Instance build() const;
};

/// Throws IoError on malformed JSON, ValidationError on bad values.
InstanceSpec parse_instance_spec(std::string_view json_text);
std::string instance_spec_to_json(const InstanceSpec& spec);
Instance load_instance_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// {"algorithm", "x", "value", "wall_ms", "status"} plus "stage1_value" for
/// two-step methods. DNC results carry null x and value plus a "reason".
std::string result_to_json(const SolveResult& result);

/// {"algorithm": "upper-bound", "x": null, "value", "wall_ms", "status": "bound",
///  "pbar", "cunder", "convexity_ok"}
std::string bound_to_json(const BoundReport& bound, double wall_ms);

}  // namespace lbs
