#include "lbs/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "lbs/errors.hpp"

namespace lbs {

std::string_view to_string(PenaltyPrototype kind) {
  switch (kind) {
    case PenaltyPrototype::Rational:
      return "rational";
    case PenaltyPrototype::Sqrt:
      return "sqrt";
    case PenaltyPrototype::Arctan:
      return "arctan";
  }
  return "unknown";
}

PenaltyPrototype parse_prototype(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "rational") return PenaltyPrototype::Rational;
  if (lower == "sqrt") return PenaltyPrototype::Sqrt;
  if (lower == "arctan") return PenaltyPrototype::Arctan;
  throw DomainError("unknown penalty prototype '" + std::string(name) +
                    "' (expected rational, sqrt or arctan)");
}

double prototype_value(PenaltyPrototype kind, double x) {
  switch (kind) {
    case PenaltyPrototype::Rational:
      return x / (1.0 + x);
    case PenaltyPrototype::Sqrt: {
      // 1 - 2/(1+s) == (s-1)/(s+1) == x/(s+1)^2, the last form keeps precision near 0.
      const double s1 = 1.0 + std::sqrt(1.0 + x);
      return x / (s1 * s1);
    }
    case PenaltyPrototype::Arctan:
      return 2.0 * std::numbers::inv_pi * std::atan(x);
  }
  return 0.0;
}

double prototype_derivative(PenaltyPrototype kind, double x) {
  switch (kind) {
    case PenaltyPrototype::Rational: {
      const double d = 1.0 + x;
      return 1.0 / (d * d);
    }
    case PenaltyPrototype::Sqrt: {
      const double s = std::sqrt(1.0 + x);
      return 1.0 / (s * (1.0 + s) * (1.0 + s));
    }
    case PenaltyPrototype::Arctan:
      return 2.0 * std::numbers::inv_pi / (1.0 + x * x);
  }
  return 0.0;
}

double prototype_inverse(PenaltyPrototype kind, double h) {
  if (!(h >= 0.0 && h < 1.0)) throw DomainError("penalty inverse requires h in [0, 1)");
  switch (kind) {
    case PenaltyPrototype::Rational:
      return h / (1.0 - h);
    case PenaltyPrototype::Sqrt:
      return 4.0 * h / ((1.0 - h) * (1.0 - h));
    case PenaltyPrototype::Arctan:
      return std::tan(0.5 * std::numbers::pi * h);
  }
  return 0.0;
}

double calibrate_eta(PenaltyPrototype kind, double level, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw DomainError("calibration threshold H must lie in (0, 1)");
  if (!(level > 0.0) || !std::isfinite(level))
    throw DomainError("calibration level L must be positive");
  return prototype_inverse(kind, threshold) / level;
}

PenaltyFunction::PenaltyFunction(PenaltyPrototype kind, double eta) : kind_(kind), eta_(eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("penalty scale eta must be positive");
}

std::optional<PenaltyTable> PenaltyTable::build(const PenaltyFunction& g, Quantity n) {
  if (n < 0 || n > kMaxEntries) return std::nullopt;
  PenaltyTable table;
  table.values_.resize(static_cast<std::size_t>(n) + 1);
  for (Quantity y = 0; y <= n; ++y) table.values_[static_cast<std::size_t>(y)] = g(static_cast<double>(y));
  return table;
}

Instance::Instance(Quantity n, std::vector<double> prices, std::vector<double> ranges,
                   PenaltyFunction g)
    : block_(n), prices_(std::move(prices)), ranges_(std::move(ranges)), g_(g) {
  if (prices_.empty()) throw ValidationError("instance needs at least one time step");
  if (n <= 0) throw ValidationError("block size N must be positive");
  if (prices_.size() != ranges_.size())
    throw ValidationError("price and penalty-range vectors differ in length");
  if (static_cast<Quantity>(prices_.size()) > n)
    throw ValidationError("T = " + std::to_string(prices_.size()) + " exceeds N = " +
                          std::to_string(n));
  for (std::size_t t = 0; t < prices_.size(); ++t) {
    const double p = prices_[t];
    const double c = ranges_[t];
    if (!(p > 0.0) || !std::isfinite(p))
      throw ValidationError("price at step " + std::to_string(t + 1) + " is not positive");
    if (!(c > 0.0) || !(c < p))
      throw ValidationError("penalty range at step " + std::to_string(t + 1) +
                            " must satisfy 0 < c_t < p_t");
  }
}

Instance make_instance(Quantity n, std::vector<double> prices, const InstanceParams& params) {
  if (!(params.beta > 0.0 && params.beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  // L defaults to N, so a bad N must surface as such rather than as a bad L.
  if (n <= 0) throw ValidationError("block size N must be positive");
  std::vector<double> ranges(prices.size());
  std::transform(prices.begin(), prices.end(), ranges.begin(),
                 [&](double p) { return params.beta * p; });
  const double eta =
      params.eta ? *params.eta
                 : calibrate_eta(params.prototype,
                                 params.level.value_or(static_cast<double>(n)), params.threshold);
  return Instance(n, std::move(prices), std::move(ranges), PenaltyFunction(params.prototype, eta));
}

double evaluate_objective(const Instance& inst, std::span<const Quantity> x) {
  if (x.size() != inst.steps())
    throw InfeasibleError("schedule has " + std::to_string(x.size()) + " entries, expected " +
                          std::to_string(inst.steps()));
  Quantity sold = 0;
  double total = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] < 0) throw InfeasibleError("negative quantity at step " + std::to_string(t + 1));
    sold += x[t];
    if (sold > inst.block()) break;
    total += inst.unit_price(t, static_cast<double>(sold)) * static_cast<double>(x[t]);
  }
  if (sold != inst.block())
    throw InfeasibleError("schedule sells " + std::to_string(sold) + " units, expected " +
                          std::to_string(inst.block()));
  return total;
}

double evaluate_relaxed(const Instance& inst, std::span<const double> x) {
  double sold = 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sold += x[t];
    total += inst.unit_price(t, sold) * x[t];
  }
  return total;
}

Schedule make_schedule(const Instance& inst, std::vector<Quantity> x) {
  Schedule s;
  s.value = evaluate_objective(inst, x);
  s.x = std::move(x);
  return s;
}

}  // namespace lbs
