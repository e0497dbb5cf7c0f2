#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lbs {

/// Units of asset. Block sizes up to 1e9 are in scope, hence 64 bits.
using Quantity = std::int64_t;

/// Prototype G of the penalty function, all mapping [0, inf) onto [0, 1).
///   RATIONAL  G(x) = x / (1 + x)
///   SQRT      G(x) = 1 - 2 / (1 + sqrt(1 + x))
///   ARCTAN    G(x) = (2 / pi) * atan(x)
enum class PenaltyPrototype { Rational, Sqrt, Arctan };

inline constexpr PenaltyPrototype kAllPrototypes[] = {
    PenaltyPrototype::Rational, PenaltyPrototype::Arctan, PenaltyPrototype::Sqrt};

std::string_view to_string(PenaltyPrototype kind);
/// Accepts "rational", "sqrt", "arctan" (case-insensitive). Throws DomainError.
PenaltyPrototype parse_prototype(std::string_view name);

double prototype_value(PenaltyPrototype kind, double x);
double prototype_derivative(PenaltyPrototype kind, double x);
double prototype_inverse(PenaltyPrototype kind, double h);

/// Scaling factor eta such that G(eta * level) = threshold.
double calibrate_eta(PenaltyPrototype kind, double level, double threshold);

/// g(y) = G(eta * y): the market-memory penalty applied to the cumulative
/// quantity sold so far.
class PenaltyFunction {
 public:
  PenaltyFunction(PenaltyPrototype kind, double eta);

  PenaltyPrototype prototype() const noexcept { return kind_; }
  double eta() const noexcept { return eta_; }

  double operator()(double y) const { return prototype_value(kind_, eta_ * y); }
  double derivative(double y) const {
    return eta_ * prototype_derivative(kind_, eta_ * y);
  }

 private:
  PenaltyPrototype kind_;
  double eta_;
};

/// Precomputed g(0..N). Only built for N <= kMaxEntries; solvers fall back to
/// on-demand evaluation otherwise.
class PenaltyTable {
 public:
  static constexpr Quantity kMaxEntries = 10'000'000;

  static std::optional<PenaltyTable> build(const PenaltyFunction& g, Quantity n);

  double operator[](Quantity y) const { return values_[static_cast<std::size_t>(y)]; }
  Quantity size() const noexcept { return static_cast<Quantity>(values_.size()); }

 private:
  std::vector<double> values_;
};

/// One liquidation problem: T steps, N units, best-bid prices p, penalty
/// ranges c = p - q, and the penalty g. Immutable once constructed.
class Instance {
 public:
  Instance(Quantity n, std::vector<double> prices, std::vector<double> ranges,
           PenaltyFunction g);

  std::size_t steps() const noexcept { return prices_.size(); }
  Quantity block() const noexcept { return block_; }
  std::span<const double> prices() const noexcept { return prices_; }
  std::span<const double> ranges() const noexcept { return ranges_; }
  const PenaltyFunction& penalty() const noexcept { return g_; }

  double price(std::size_t t) const { return prices_[t]; }
  double range(std::size_t t) const { return ranges_[t]; }

  /// Unit execution price at step t once `sold` units have been sold in total.
  double unit_price(std::size_t t, double sold) const {
    return prices_[t] - ranges_[t] * g_(sold);
  }

 private:
  Quantity block_;
  std::vector<double> prices_;
  std::vector<double> ranges_;
  PenaltyFunction g_;
};

struct InstanceParams {
  double beta = 0.9;
  PenaltyPrototype prototype = PenaltyPrototype::Arctan;
  double threshold = 0.99;
  /// Calibration level; defaults to N when absent.
  std::optional<double> level;
  /// Bypasses calibration entirely (eta = 1 reproduces the uncalibrated g = G).
  std::optional<double> eta;
};

/// Builds an instance with floor q_t = (1 - beta) p_t, i.e. c_t = beta p_t.
Instance make_instance(Quantity n, std::vector<double> prices, const InstanceParams& params = {});

/// Integer schedule x with sum N and its cached objective value.
struct Schedule {
  std::vector<Quantity> x;
  double value = 0.0;
};

/// f(x) = sum_t [p_t - c_t g(y_t)] x_t with y_t the running sum of x.
/// Throws InfeasibleError when x is not a feasible schedule of `inst`.
double evaluate_objective(const Instance& inst, std::span<const Quantity> x);

/// Same objective over real-valued quantities (the continuous relaxation).
/// No feasibility check.
double evaluate_relaxed(const Instance& inst, std::span<const double> x);

Schedule make_schedule(const Instance& inst, std::vector<Quantity> x);

}  // namespace lbs
