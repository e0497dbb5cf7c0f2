#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lbs/dp.hpp"
#include "lbs/model.hpp"
#include "lbs/solver.hpp"

namespace lbs {

/// Checks that h(x) = x g(x) is convex on (0, N] through second differences
///   h(x + d) - 2 h(x) + h(x - d),  d = max(1e-4 x, 1e-6),
/// over a geometric grid. A difference counts as a violation only when it is
/// negative beyond the rounding noise of the three evaluations; at least one
/// difference must be resolvably positive.
bool check_xg_convexity(const std::function<double(double)>& g, double block);
bool check_xg_convexity(const PenaltyFunction& g, Quantity block);

struct BoundReport {
  /// N [max_t p_t - min_t c_t g(N / T)], g evaluated at the real argument N / T.
  double ub = 0.0;
  double pbar = 0.0;
  double cunder = 0.0;
  /// False means x g(x) failed the convexity check and `ub` is not a proven bound.
  bool convexity_ok = false;
};

BoundReport upper_bound(const Instance& inst);

/// U(x) = sum_t [p_t - c_t g(x_t)] x_t, the separable majorant of the relaxation.
double separated_objective(const Instance& inst, std::span<const double> x);
std::vector<double> separated_gradient(const Instance& inst, std::span<const double> x);

/// Gradient of the relaxed objective:
///   d/dx_j = p_j - c_j g(y_j) - sum_{t >= j} c_t g'(y_t) x_t.
std::vector<double> relaxed_gradient(const Instance& inst, std::span<const double> x);

/// Euclidean projection onto {x >= 0, sum x = total} (Michelot's active-set
/// iteration).
std::vector<double> project_to_simplex(std::span<const double> v, double total);

enum class ContinuousObjective { Relaxation, Separated };

struct ContinuousOptions {
  /// Stop when |P(x + grad) - x|_inf (in assets) falls below this value.
  double tolerance = 1e-4;
  int max_iters = 20'000;
  ContinuousObjective objective = ContinuousObjective::Relaxation;
  /// Starting point; the uniform split N / T when absent.
  std::optional<std::vector<double>> start;
};

struct ContinuousResult {
  std::vector<double> x;
  double value = 0.0;
  double stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent on the scaled simplex with Barzilai-Borwein
/// steps and Armijo backtracking. Returns a stationary point (or the best
/// iterate, converged = false).
ContinuousResult continuous_first_stage(const Instance& inst, const ContinuousOptions& options = {});

/// Continuous first stage followed by funnel DP of radius lambda * P.
SolveResult solve_two_step_continuous(const Instance& inst, const TwoStepParams& params = {},
                                      const SolveLimits& limits = {},
                                      const ContinuousOptions& options = {});

}  // namespace lbs
