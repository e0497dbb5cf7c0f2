#include "lbs/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lbs/errors.hpp"

namespace lbs {

namespace {

constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

struct Windows {
  std::vector<Quantity> lo;
  std::vector<Quantity> hi;
};

// Rows 0..T of reachable cumulative sales. Row T collapses onto {budget}.
Windows reachable_windows(std::size_t steps, Quantity budget, std::span<const Quantity> lower,
                          std::span<const Quantity> upper) {
  if (lower.size() != steps || upper.size() != steps)
    throw DomainError("bounds must have one entry per time step");
  std::vector<Quantity> rest_lower(steps + 1, 0);
  std::vector<Quantity> rest_upper(steps + 1, 0);
  for (std::size_t t = steps; t-- > 0;) {
    if (lower[t] < 0 || upper[t] < lower[t])
      throw DomainError("step " + std::to_string(t + 1) + " has bounds outside 0 <= l <= u");
    rest_lower[t] = std::min(rest_lower[t + 1] + lower[t], budget + 1);
    rest_upper[t] = std::min(rest_upper[t + 1] + upper[t], budget + 1);
  }
  if (rest_upper[0] < budget)
    throw InfeasibleError("funnel cannot reach the block size: sum of upper bounds " +
                          std::to_string(rest_upper[0]) + " < " + std::to_string(budget));
  if (rest_lower[0] > budget)
    throw InfeasibleError("funnel overshoots the block size: sum of lower bounds exceeds " +
                          std::to_string(budget));

  Windows w;
  w.lo.assign(steps + 1, 0);
  w.hi.assign(steps + 1, 0);
  Quantity sum_lower = 0;
  Quantity sum_upper = 0;
  for (std::size_t t = 1; t <= steps; ++t) {
    sum_lower = std::min(sum_lower + lower[t - 1], budget);
    sum_upper = std::min(sum_upper + upper[t - 1], budget);
    w.lo[t] = std::max({sum_lower, budget - rest_upper[t], Quantity{0}});
    w.hi[t] = std::min({sum_upper, budget - rest_lower[t]});
    if (w.lo[t] > w.hi[t])
      throw InfeasibleError("funnel is empty at step " + std::to_string(t));
  }
  return w;
}

struct ArgMax {
  double value;
  Quantity k;
};

// max_{k in [kmin, kmax]} column[-k] + rate * k, smallest k on ties.
// Four independent lanes keep the loop free of a serial compare chain; k is
// carried as a double (exact below 2^53) so the body stays in SIMD registers.
ArgMax best_offer(const double* column, Quantity kmin, Quantity kmax, double rate) {
  double lane_v[4] = {kUnreachable, kUnreachable, kUnreachable, kUnreachable};
  double lane_k[4];
  double kd[4];
  for (int l = 0; l < 4; ++l) {
    lane_k[l] = static_cast<double>(kmin);
    kd[l] = static_cast<double>(kmin + l);
  }
  const double* src = column - kmin;
  Quantity k = kmin;
  for (; k + 3 <= kmax; k += 4, src -= 4) {
    for (int l = 0; l < 4; ++l) {
      const double v = src[-l] + rate * kd[l];
      const bool better = v > lane_v[l];
      lane_v[l] = better ? v : lane_v[l];
      lane_k[l] = better ? kd[l] : lane_k[l];
      kd[l] += 4.0;
    }
  }
  ArgMax best{kUnreachable, kmin};
  for (int l = 0; l < 4; ++l) {
    const auto lk = static_cast<Quantity>(lane_k[l]);
    if (lane_v[l] > best.value || (lane_v[l] == best.value && lk < best.k)) best = {lane_v[l], lk};
  }
  for (; k <= kmax; ++k, --src) {
    const double v = *src + rate * static_cast<double>(k);
    if (v > best.value) best = {v, k};
  }
  return best;
}

}  // namespace

struct DpKernel {
  static std::optional<DpTable> fill(const Instance& inst, Quantity unit, Quantity budget,
                                     std::span<const Quantity> lower,
                                     std::span<const Quantity> upper, const SolveLimits& limits,
                                     const DpFillOptions& options) {
    const std::size_t steps = inst.steps();
    if (unit < 1) throw DomainError("DP unit must be at least 1");
    if (budget < 0) throw DomainError("DP budget must be non-negative");
    if (budget > static_cast<Quantity>(std::numeric_limits<std::uint32_t>::max()))
      throw DomainError("DP budget exceeds the 32-bit parent range");

    const std::size_t need = dp_memory_estimate(steps, budget, lower, upper, options.keep_values);
    if (need > limits.memory_limit_bytes) throw MemoryBudgetError(need, limits.memory_limit_bytes);

    Windows w = reachable_windows(steps, budget, lower, upper);

    DpTable table;
    table.unit_ = unit;
    table.lo_ = std::move(w.lo);
    table.hi_ = std::move(w.hi);
    table.offset_.assign(steps + 2, 0);
    Quantity widest = 1;
    for (std::size_t t = 0; t <= steps; ++t) {
      const Quantity width = table.hi_[t] - table.lo_[t] + 1;
      widest = std::max(widest, width);
      table.offset_[t + 1] = table.offset_[t] + static_cast<std::size_t>(width);
    }
    table.parent_.assign(table.offset_[steps + 1], 0);
    if (options.keep_values) {
      table.values_.assign(table.offset_[steps + 1], kUnreachable);
      table.values_[0] = 0.0;
    }

    const PenaltyTable* gtab = limits.table;
    if (gtab != nullptr && gtab->size() <= budget * unit) gtab = nullptr;
    const PenaltyFunction& g = inst.penalty();
    const double unit_d = static_cast<double>(unit);

    std::vector<double> prev(static_cast<std::size_t>(widest), kUnreachable);
    std::vector<double> curr(static_cast<std::size_t>(widest), kUnreachable);
    prev[0] = 0.0;  // row 0 is the single state n = 0

    const Deadline deadline(limits.time_limit_s);
    std::size_t since_check = 0;

    for (std::size_t t = 1; t <= steps; ++t) {
      const Quantity plo = table.lo_[t - 1];
      const Quantity phi = table.hi_[t - 1];
      const Quantity lo = table.lo_[t];
      const Quantity hi = table.hi_[t];
      const Quantity lt = lower[t - 1];
      const Quantity ut = upper[t - 1];
      const double p = inst.price(t - 1);
      const double c = inst.range(t - 1);
      std::uint32_t* parents = table.parent_.data() + table.offset_[t];
      const double* prev_row = prev.data();

      for (Quantity n = lo; n <= hi; ++n) {
        const Quantity kmin = std::max(lt, n - phi);
        const Quantity kmax = std::min(ut, n - plo);
        double best = kUnreachable;
        Quantity best_k = kmin;
        if (kmin <= kmax) {
          const Quantity sold = n * unit;
          const double gn = gtab != nullptr ? (*gtab)[sold] : g(static_cast<double>(sold));
          const double rate = (p - c * gn) * unit_d;
          const ArgMax m = best_offer(prev_row + (n - plo), kmin, kmax, rate);
          best = m.value;
          best_k = m.k;
        }
        curr[static_cast<std::size_t>(n - lo)] = best;
        parents[n - lo] = static_cast<std::uint32_t>(best_k);

        since_check += static_cast<std::size_t>(std::max<Quantity>(kmax - kmin + 1, 1));
        if (since_check >= (std::size_t{1} << 22)) {
          since_check = 0;
          if (deadline.expired()) return std::nullopt;
        }
      }
      if (options.keep_values)
        std::copy_n(curr.begin(), hi - lo + 1, table.values_.begin() + table.offset_[t]);
      std::swap(prev, curr);
    }
    table.optimum_ = prev[0];
    if (!(table.optimum_ > kUnreachable))
      throw InfeasibleError("no feasible schedule inside the DP bounds");
    return table;
  }
};

std::vector<Quantity> DpTable::backtrack() const {
  const std::size_t steps = rows() - 1;
  std::vector<Quantity> x(steps, 0);
  Quantity n = hi_[steps];
  for (std::size_t t = steps; t >= 1; --t) {
    const Quantity k = parent(t, n);
    x[t - 1] = k * unit_;
    n -= k;
  }
  return x;
}

std::size_t dp_memory_estimate(std::size_t steps, Quantity budget, std::span<const Quantity> lower,
                               std::span<const Quantity> upper, bool keep_values) {
  const Windows w = reachable_windows(steps, budget, lower, upper);
  std::size_t cells = 0;
  std::size_t widest = 1;
  for (std::size_t t = 0; t <= steps; ++t) {
    const auto width = static_cast<std::size_t>(w.hi[t] - w.lo[t] + 1);
    cells += width;
    widest = std::max(widest, width);
  }
  const std::size_t per_cell = sizeof(std::uint32_t) + (keep_values ? sizeof(double) : 0);
  return cells * per_cell + 2 * widest * sizeof(double) + (steps + 2) * 3 * sizeof(Quantity);
}

std::optional<DpTable> fill_dp_table(const Instance& inst, Quantity unit, Quantity budget,
                                     std::span<const Quantity> lower,
                                     std::span<const Quantity> upper, const SolveLimits& limits,
                                     const DpFillOptions& options) {
  return DpKernel::fill(inst, unit, budget, lower, upper, limits, options);
}

FunnelBounds make_funnel(Quantity block, std::span<const double> x0, Quantity radius) {
  if (radius < 1) throw DomainError("funnel radius must be at least 1");
  FunnelBounds f;
  const std::size_t steps = x0.size();
  f.lower.resize(steps);
  f.upper.resize(steps);
  f.cum_lower.resize(steps);
  f.cum_upper.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    if (!std::isfinite(x0[t])) throw DomainError("funnel centre must be finite");
    const double lo = std::floor(x0[t]) - static_cast<double>(radius);
    const double hi = std::ceil(x0[t]) + static_cast<double>(radius);
    f.lower[t] = static_cast<Quantity>(std::clamp(lo, 0.0, static_cast<double>(block)));
    f.upper[t] = static_cast<Quantity>(std::clamp(hi, 0.0, static_cast<double>(block)));
  }
  const Windows w = reachable_windows(steps, block, f.lower, f.upper);
  for (std::size_t t = 0; t < steps; ++t) {
    f.cum_lower[t] = w.lo[t + 1];
    f.cum_upper[t] = w.hi[t + 1];
  }
  return f;
}

namespace {

SolveResult dnc(std::string algorithm, SolveStatus status, const Stopwatch& clock) {
  SolveResult r;
  r.algorithm = std::move(algorithm);
  r.status = status;
  r.wall_ms = clock.elapsed_ms();
  return r;
}

}  // namespace

SolveResult solve_exact(const Instance& inst, const SolveLimits& limits) {
  const Stopwatch clock;
  const Quantity n = inst.block();
  const std::vector<Quantity> lower(inst.steps(), 0);
  const std::vector<Quantity> upper(inst.steps(), n);
  auto table = fill_dp_table(inst, 1, n, lower, upper, limits);
  if (!table) return dnc("exact", SolveStatus::DncTime, clock);

  SolveResult r;
  r.algorithm = "exact";
  r.status = SolveStatus::Optimal;
  r.schedule = make_schedule(inst, table->backtrack());
  r.wall_ms = clock.elapsed_ms();
  return r;
}

SolveResult solve_coarse(const Instance& inst, Quantity grain, const SolveLimits& limits) {
  const Stopwatch clock;
  const Quantity n = inst.block();
  if (grain < 1 || grain > n) throw DomainError("grain must satisfy 1 <= P <= N");
  const Quantity buckets = n / grain;
  const std::vector<Quantity> lower(inst.steps(), 0);
  const std::vector<Quantity> upper(inst.steps(), buckets);
  auto table = fill_dp_table(inst, grain, buckets, lower, upper, limits);
  if (!table) return dnc("coarse", SolveStatus::DncTime, clock);

  std::vector<Quantity> x = table->backtrack();
  x.back() += n - buckets * grain;

  SolveResult r;
  r.algorithm = "coarse";
  r.status = grain == 1 ? SolveStatus::Optimal : SolveStatus::Heuristic;
  r.schedule = make_schedule(inst, std::move(x));
  r.wall_ms = clock.elapsed_ms();
  return r;
}

SolveResult solve_bounded(const Instance& inst, std::span<const double> x0, Quantity radius,
                          const SolveLimits& limits) {
  const Stopwatch clock;
  if (x0.size() != inst.steps()) throw DomainError("funnel centre must have one entry per step");
  const FunnelBounds funnel = make_funnel(inst.block(), x0, radius);
  auto table = fill_dp_table(inst, 1, inst.block(), funnel.lower, funnel.upper, limits);
  if (!table) return dnc("bounded", SolveStatus::DncTime, clock);

  SolveResult r;
  r.algorithm = "bounded";
  r.status = radius >= inst.block() ? SolveStatus::Optimal : SolveStatus::Heuristic;
  r.schedule = make_schedule(inst, table->backtrack());
  r.wall_ms = clock.elapsed_ms();
  return r;
}

SolveResult solve_bounded(const Instance& inst, std::span<const Quantity> x0, Quantity radius,
                          const SolveLimits& limits) {
  std::vector<double> centre(x0.begin(), x0.end());
  return solve_bounded(inst, std::span<const double>(centre), radius, limits);
}

Quantity auto_grain(std::size_t steps, Quantity block) {
  const double a = std::log10(static_cast<double>(steps));
  const double b = std::log10(static_cast<double>(block));
  const double c = (2.0 * b - a - 2.0) / 4.0;
  const auto grain = static_cast<Quantity>(std::floor(std::pow(10.0, c)));
  return std::clamp<Quantity>(grain, 1, block);
}

Quantity TwoStepParams::resolve_grain(const Instance& inst) const {
  const Quantity p = grain.value_or(auto_grain(inst.steps(), inst.block()));
  if (p < 1) throw DomainError("grain must be at least 1");
  return std::min(p, inst.block());
}

Quantity TwoStepParams::resolve_radius(const Instance& inst) const {
  if (radius) {
    if (*radius < 1) throw DomainError("funnel radius must be at least 1");
    return *radius;
  }
  if (lambda < 1) throw DomainError("funnel multiplier lambda must be at least 1");
  return resolve_grain(inst) * lambda;
}

SolveResult solve_two_step(const Instance& inst, const TwoStepParams& params,
                           const SolveLimits& limits) {
  const Stopwatch clock;
  const Quantity grain = params.resolve_grain(inst);
  const Quantity radius = params.resolve_radius(inst);

  SolveResult first = solve_coarse(inst, grain, limits);
  if (is_dnc(first.status)) return dnc("two-step", first.status, clock);

  SolveLimits rest = limits;
  if (limits.time_limit_s > 0.0 && std::isfinite(limits.time_limit_s)) {
    rest.time_limit_s = limits.time_limit_s - clock.elapsed_ms() / 1000.0;
    if (rest.time_limit_s <= 0.0) return dnc("two-step", SolveStatus::DncTime, clock);
  }
  SolveResult second =
      solve_bounded(inst, std::span<const Quantity>(first.schedule->x), radius, rest);
  if (is_dnc(second.status)) return dnc("two-step", second.status, clock);

  second.algorithm = "two-step";
  second.stage1_value = first.schedule->value;
  second.wall_ms = clock.elapsed_ms();
  return second;
}

}  // namespace lbs
