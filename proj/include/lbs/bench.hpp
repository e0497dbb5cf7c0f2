#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lbs/bounds.hpp"
#include "lbs/dp.hpp"
#include "lbs/local_search.hpp"
#include "lbs/model.hpp"
#include "lbs/solver.hpp"

namespace lbs {

enum class Algorithm {
  FireSale,
  Uniform,
  Ils,
  Coarse,
  TwoStep,
  TwoStepContinuous,
  Exact,
  UpperBound,
};

/// Canonical names: fire-sale, uniform, ils, coarse, two-step,
/// two-step-continuous, exact, upper-bound. Short labels FS, US, ILS, CG,
/// TS1, TS2, DP, UB are accepted as well (case-insensitive).
Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm alg);
std::string_view algorithm_label(Algorithm alg);

struct AlgorithmOptions {
  /// coarse: defaults to auto_grain. two-step: likewise.
  std::optional<Quantity> grain;
  Quantity lambda = 5;
  std::optional<Quantity> radius;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::size_t memory_limit_bytes = default_memory_budget();
  std::uint64_t ils_max_iterations = IlsConfig{}.max_iterations;
};

/// One algorithm applied to one instance.
struct RunOutcome {
  Algorithm algorithm = Algorithm::Exact;
  SolveResult result;
  /// Set for UpperBound only.
  std::optional<BoundReport> bound;

  /// Objective value, or the bound for UpperBound; nullopt for DNC.
  std::optional<double> value() const;
  /// Result status spelling, "bound" for UpperBound.
  std::string status() const;
  std::string to_json() const;
};

/// Dispatches to the solver. A PenaltyTable passed in `table` must match the
/// instance; wall time excludes its construction.
RunOutcome run_algorithm(const Instance& inst, Algorithm alg, const AlgorithmOptions& options,
                         const PenaltyTable* table = nullptr);

/// Price source of one bench column.
struct PriceMode {
  enum class Kind { Constant, Average, Gbm } kind = Kind::Constant;
  double mu = 0.0;
  double sigma = 0.0;

  /// "cst", "avg" or "gbm:<mu>:<sigma>".
  static PriceMode parse(std::string_view text);
  std::string label() const;
};

struct GridPoint {
  std::size_t steps;
  Quantity block;
};
/// "1:2" means (T, N) = (10^1, 10^2).
GridPoint parse_grid_point(std::string_view text);

struct BenchConfig {
  std::vector<GridPoint> grid;
  std::vector<PenaltyPrototype> prototypes;
  std::vector<PriceMode> modes;
  std::vector<Algorithm> algorithms;
  AlgorithmOptions options;
  double beta = 0.9;
  double threshold = 0.99;
  /// Replaces the calibrated eta when set.
  std::optional<double> eta;
  double p0 = 100.0;
  std::uint64_t seed = 0;
  std::size_t paths = 10;
  /// Length of simulated paths before subsampling to T.
  std::size_t t_max = 1000;
  std::size_t workers = 1;

  BenchConfig();
};

/// JSON form used by the C API and CLI:
///   {"grid": ["1:2", ...], "prototypes": [...], "modes": ["cst", "avg"],
///    "algorithms": [...], "grain", "lambda", "radius", "time_limit",
///    "memory_limit", "beta", "H", "eta", "p0", "seed", "paths", "T_max",
///    "workers"}
/// Missing keys keep their defaults. Throws ValidationError.
BenchConfig parse_bench_config(std::string_view json_text);

struct BenchRow {
  std::string instance_id;
  std::size_t steps = 0;
  Quantity block = 0;
  PenaltyPrototype prototype = PenaltyPrototype::Arctan;
  std::string mode;       // cst, avg or gbm:<mu>:<sigma>
  int moment_index = -1;  // 0..8 for avg rows
  double mu = 0.0;
  double sigma = 0.0;
  Algorithm algorithm = Algorithm::Exact;
  std::string status;
  std::optional<double> value;
  std::optional<double> reference;
  std::optional<double> gap_pct;
  double wall_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  BenchConfig config;
  /// False when cells ran concurrently, so wall times may be skewed.
  bool timing_reliable = true;

  std::string csv() const;
  std::string markdown() const;
};

/// gap = 100 (reference - value) / reference for lower bounds and
/// 100 (value - reference) / reference for the upper bound.
double gap_percent(Algorithm alg, double value, double reference);

/// "0" when |gap| <= 1e-9, "<ε" below 0.01, otherwise two decimals.
std::string format_gap(std::optional<double> gap);
/// Seconds: "<ε" below 0.01 s, otherwise two decimals.
std::string format_seconds(double seconds);

BenchReport run_bench(const BenchConfig& config);

struct CalibrationConfig {
  std::vector<double> thresholds{0.75, 0.99};
  /// Adds the uncalibrated eta = 1 table.
  bool include_unit_eta = true;
  std::vector<GridPoint> grid;
  std::vector<PenaltyPrototype> prototypes;
  double beta = 0.9;
  double p0 = 100.0;
  double time_limit_s = 600.0;
  std::size_t memory_limit_bytes = default_memory_budget();
  std::size_t workers = 1;

  /// Grid up to (10^2, 10^4); `large` adds (10^1, 10^5), (10^1, 10^6),
  /// (10^2, 10^5) and (10^3, 10^5).
  static std::vector<GridPoint> default_grid(bool large);
  CalibrationConfig();
};

/// {"H": [...], "unit_eta": true, "grid": [...], "large": false,
///  "prototypes": [...], "beta", "p0", "time_limit", "memory_limit", "workers"}
CalibrationConfig parse_calibration_config(std::string_view json_text);

struct CalibrationCell {
  std::optional<double> threshold;  // nullopt: eta = 1
  double eta = 1.0;
  GridPoint size{};
  PenaltyPrototype prototype = PenaltyPrototype::Arctan;
  /// Absent when the exact reference did not complete.
  std::optional<double> fire_sale_gap;
  std::optional<double> uniform_gap;
  std::string exact_status;
  double exact_ms = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationCell> cells;
  CalibrationConfig config;

  std::string csv() const;
  /// One table per eta, prototypes as FS/US column pairs.
  std::string markdown() const;
};

CalibrationReport run_calibration(const CalibrationConfig& config);

}  // namespace lbs
