#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lbs/model.hpp"
#include "lbs/solver.hpp"

namespace lbs {

/// Per-step decision bounds l_t <= x_t <= u_t and the reachable window of
/// cumulative sales [L_t, U_t] after step t.
///
/// L_t and U_t are the capped partial sums of l and u, further tightened with
/// the remaining capacity of later steps (L_t >= N - sum_{i>t} u_i and
/// U_t <= N - sum_{i>t} l_i) so every retained state can still reach N.
struct FunnelBounds {
  std::vector<Quantity> lower;
  std::vector<Quantity> upper;
  std::vector<Quantity> cum_lower;
  std::vector<Quantity> cum_upper;
};

/// Funnel of half-width `radius` around x0:
///   l_t = max(0, floor(x0_t) - radius),  u_t = min(N, ceil(x0_t) + radius).
/// Throws InfeasibleError when no schedule fits (sum of u < N or sum of l > N).
FunnelBounds make_funnel(Quantity block, std::span<const double> x0, Quantity radius);

/// Bellman table over windowed rows. Row t (0..T) covers cumulative sales
/// n in [lo[t], hi[t]] expressed in units of `unit` assets; parent[t][n] is the
/// quantity (in units) sold at step t on the best path into (t, n).
class DpTable {
 public:
  Quantity unit() const noexcept { return unit_; }
  std::size_t rows() const noexcept { return lo_.size(); }
  Quantity lo(std::size_t t) const { return lo_[t]; }
  Quantity hi(std::size_t t) const { return hi_[t]; }
  bool contains(std::size_t t, Quantity n) const { return n >= lo_[t] && n <= hi_[t]; }

  Quantity parent(std::size_t t, Quantity n) const {
    return static_cast<Quantity>(parent_[offset_[t] + static_cast<std::size_t>(n - lo_[t])]);
  }
  /// Only available when the table was filled with keep_values.
  bool has_values() const noexcept { return !values_.empty(); }
  double value(std::size_t t, Quantity n) const {
    return values_[offset_[t] + static_cast<std::size_t>(n - lo_[t])];
  }
  double optimum() const noexcept { return optimum_; }
  std::size_t cells() const noexcept { return parent_.size(); }

  /// Quantities (in assets, not units) along the stored argmax parents.
  std::vector<Quantity> backtrack() const;

 private:
  friend struct DpKernel;

  Quantity unit_ = 1;
  std::vector<Quantity> lo_;
  std::vector<Quantity> hi_;
  std::vector<std::size_t> offset_;
  std::vector<std::uint32_t> parent_;
  std::vector<double> values_;
  double optimum_ = 0.0;
};

struct DpFillOptions {
  /// Retain every O[t][n] (for inspection and tests); doubles the footprint.
  bool keep_values = false;
};

/// Fills the restricted Bellman recursion
///   O[t][n] = max_{k in [l_t, u_t]} O[t-1][n-k] + [p_t - c_t g(n unit)] k unit
/// over `budget` units of size `unit`. Ties go to the smallest k.
/// Returns nullopt when the time limit expires. Throws MemoryBudgetError
/// before allocating when the table would not fit.
std::optional<DpTable> fill_dp_table(const Instance& inst, Quantity unit, Quantity budget,
                                     std::span<const Quantity> lower,
                                     std::span<const Quantity> upper, const SolveLimits& limits,
                                     const DpFillOptions& options = {});

/// Bytes needed by fill_dp_table for the given bounds (parents plus rows).
std::size_t dp_memory_estimate(std::size_t steps, Quantity budget,
                               std::span<const Quantity> lower, std::span<const Quantity> upper,
                               bool keep_values = false);

/// Global optimum by the full O(T N^2) recursion.
SolveResult solve_exact(const Instance& inst, const SolveLimits& limits = {});

/// Exact DP over buckets of `grain` units with budget floor(N / grain); the
/// remainder N mod grain is added to the last step.
SolveResult solve_coarse(const Instance& inst, Quantity grain, const SolveLimits& limits = {});

/// DP restricted to the funnel of half-width `radius` around x0.
SolveResult solve_bounded(const Instance& inst, std::span<const double> x0, Quantity radius,
                          const SolveLimits& limits = {});
SolveResult solve_bounded(const Instance& inst, std::span<const Quantity> x0, Quantity radius,
                          const SolveLimits& limits = {});

/// Grain minimising the two-step cost: P = floor(10^c) with
/// c = (2 log10 N - log10 T - 2) / 4, clamped to [1, N].
Quantity auto_grain(std::size_t steps, Quantity block);

struct TwoStepParams {
  /// nullopt selects auto_grain.
  std::optional<Quantity> grain;
  Quantity lambda = 5;
  /// Overrides the funnel radius lambda * P.
  std::optional<Quantity> radius;

  Quantity resolve_grain(const Instance& inst) const;
  Quantity resolve_radius(const Instance& inst) const;
};

/// Coarse DP with grain P, then funnel DP of radius lambda * P around it.
SolveResult solve_two_step(const Instance& inst, const TwoStepParams& params = {},
                           const SolveLimits& limits = {});

}  // namespace lbs
