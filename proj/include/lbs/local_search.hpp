#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "lbs/model.hpp"
#include "lbs/solver.hpp"

namespace lbs {

/// Sell the whole block at the first step: x = (N, 0, ..., 0).
Schedule fire_sale(const Instance& inst);

/// x_t = N / T; when T does not divide N the remainder goes one unit at a
/// time to the earliest steps.
Schedule uniform_sale(const Instance& inst);

struct IlsConfig {
  /// Hard cap on applied shifts, summed over all shift sizes.
  std::uint64_t max_iterations = 100'000'000;
  double time_limit_s = std::numeric_limits<double>::infinity();
  /// Shift sizes 2^R, 2^(R-1), ..., 1 with R = floor(log2 N); otherwise only
  /// `shift` is used.
  bool dichotomy = true;
  Quantity shift = 1;
};

/// Shift sizes visited by ils() for this block size and configuration.
std::vector<Quantity> shift_sequence(Quantity block, const IlsConfig& config);

/// Relative improvement a shift must exceed to be applied.
inline constexpr double kIlsImprovementTolerance = 1e-9;

/// Change of the objective when `amount` units move from step t+1 to step t
/// (positive amount) or from t to t+1 (negative amount); only the two
/// affected terms are recomputed. `sold_through_t` is y_t, the running sum
/// up to and including step t. NaN when the move would make an entry negative.
double adjacent_shift_delta(const Instance& inst, const std::vector<Quantity>& x, std::size_t t,
                            Quantity sold_through_t, Quantity amount);

/// Best-improvement local search over adjacent pairs (t, t+1): each pass
/// scans all 2 (T - 1) shifts of the current size, applies the single
/// largest strict improvement, and repeats until no shift improves.
SolveResult ils(const Instance& inst, const Schedule& start, const IlsConfig& config = {});

}  // namespace lbs
