#include "lbs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lbs/errors.hpp"

namespace lbs {

bool check_xg_convexity(const std::function<double(double)>& g, double block) {
  if (!(block > 0.0)) return false;
  constexpr int kPoints = 400;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double first = std::min(1e-3, block);
  const double ratio = std::pow(block / first, 1.0 / (kPoints - 1));

  auto h = [&](double x) { return x * g(x); };
  bool resolved_positive = false;
  double x = first;
  for (int i = 0; i < kPoints; ++i, x *= ratio) {
    const double d = std::max(x * 1e-4, 1e-6);
    const double lo = std::max(x - d, 0.0);
    const double hl = h(lo);
    const double hm = h(x);
    const double hr = h(x + d);
    const double second = hr - 2.0 * hm + hl;
    const double noise = 64.0 * kEps * (std::abs(hr) + 2.0 * std::abs(hm) + std::abs(hl));
    if (!std::isfinite(second)) return false;
    if (second < -noise) return false;
    if (second > noise) resolved_positive = true;
  }
  return resolved_positive;
}

bool check_xg_convexity(const PenaltyFunction& g, Quantity block) {
  return check_xg_convexity([&g](double y) { return g(y); }, static_cast<double>(block));
}

BoundReport upper_bound(const Instance& inst) {
  BoundReport r;
  r.pbar = *std::max_element(inst.prices().begin(), inst.prices().end());
  r.cunder = *std::min_element(inst.ranges().begin(), inst.ranges().end());
  const double n = static_cast<double>(inst.block());
  const double share = n / static_cast<double>(inst.steps());
  r.ub = n * (r.pbar - r.cunder * inst.penalty()(share));
  r.convexity_ok = check_xg_convexity(inst.penalty(), inst.block());
  return r;
}

double separated_objective(const Instance& inst, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) total += inst.unit_price(t, x[t]) * x[t];
  return total;
}

std::vector<double> separated_gradient(const Instance& inst, std::span<const double> x) {
  const PenaltyFunction& g = inst.penalty();
  std::vector<double> grad(x.size());
  for (std::size_t t = 0; t < x.size(); ++t)
    grad[t] = inst.price(t) - inst.range(t) * (g(x[t]) + x[t] * g.derivative(x[t]));
  return grad;
}

std::vector<double> relaxed_gradient(const Instance& inst, std::span<const double> x) {
  const PenaltyFunction& g = inst.penalty();
  const std::size_t steps = x.size();
  std::vector<double> sold(steps);
  std::partial_sum(x.begin(), x.end(), sold.begin());
  std::vector<double> grad(steps);
  double tail = 0.0;  // sum_{t >= j} c_t g'(y_t) x_t
  for (std::size_t j = steps; j-- > 0;) {
    tail += inst.range(j) * g.derivative(sold[j]) * x[j];
    grad[j] = inst.price(j) - inst.range(j) * g(sold[j]) - tail;
  }
  return grad;
}

std::vector<double> project_to_simplex(std::span<const double> v, double total) {
  if (v.empty()) throw DomainError("cannot project an empty vector");
  if (!(total >= 0.0)) throw DomainError("simplex total must be non-negative");
  std::vector<std::size_t> active(v.size());
  std::iota(active.begin(), active.end(), std::size_t{0});
  double tau = 0.0;
  while (true) {
    double sum = 0.0;
    for (std::size_t i : active) sum += v[i];
    tau = (sum - total) / static_cast<double>(active.size());
    const auto keep = std::remove_if(active.begin(), active.end(),
                                     [&](std::size_t i) { return v[i] <= tau; });
    if (keep == active.end()) break;
    active.erase(keep, active.end());
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

namespace {

struct Objective {
  const Instance& inst;
  ContinuousObjective kind;

  double value(std::span<const double> x) const {
    return kind == ContinuousObjective::Relaxation ? evaluate_relaxed(inst, x)
                                                   : separated_objective(inst, x);
  }
  std::vector<double> gradient(std::span<const double> x) const {
    return kind == ContinuousObjective::Relaxation ? relaxed_gradient(inst, x)
                                                   : separated_gradient(inst, x);
  }
};

double stationarity(std::span<const double> x, std::span<const double> grad, double total) {
  std::vector<double> moved(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) moved[i] = x[i] + grad[i];
  const std::vector<double> p = project_to_simplex(moved, total);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(p[i] - x[i]));
  return worst;
}

}  // namespace

ContinuousResult continuous_first_stage(const Instance& inst, const ContinuousOptions& options) {
  if (!(options.tolerance > 0.0)) throw DomainError("continuous stage tolerance must be positive");
  const std::size_t steps = inst.steps();
  const double total = static_cast<double>(inst.block());
  const Objective obj{inst, options.objective};

  std::vector<double> x;
  if (options.start) {
    if (options.start->size() != steps) throw DomainError("start point has the wrong length");
    x = project_to_simplex(*options.start, total);
  } else {
    x.assign(steps, total / static_cast<double>(steps));
  }

  ContinuousResult out;
  double f = obj.value(x);
  std::vector<double> grad = obj.gradient(x);
  double max_grad = 0.0;
  for (double gi : grad) max_grad = std::max(max_grad, std::abs(gi));
  double step = total / (static_cast<double>(steps) * std::max(max_grad, 1e-12));

  int it = 0;
  for (; it < options.max_iters; ++it) {
    out.stationarity = stationarity(x, grad, total);
    if (out.stationarity <= options.tolerance) {
      out.converged = true;
      break;
    }

    std::vector<double> trial(steps);
    std::vector<double> next;
    double f_next = 0.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t i = 0; i < steps; ++i) trial[i] = x[i] + step * grad[i];
      next = project_to_simplex(trial, total);
      double ascent = 0.0;
      for (std::size_t i = 0; i < steps; ++i) ascent += grad[i] * (next[i] - x[i]);
      f_next = obj.value(next);
      if (f_next >= f + 1e-4 * ascent && ascent >= 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // rounding floor reached; x is the best iterate

    std::vector<double> grad_next = obj.gradient(next);
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      const double s = next[i] - x[i];
      ss += s * s;
      sy += s * (grad_next[i] - grad[i]);
    }
    // Ascent: curvature along s is -sy for a concave direction.
    step = (sy < 0.0 && ss > 0.0) ? ss / -sy : step * 2.0;
    if (!std::isfinite(step) || step <= 0.0) step = 1.0;

    x = std::move(next);
    f = f_next;
    grad = std::move(grad_next);
  }
  if (!out.converged) out.stationarity = stationarity(x, grad, total);
  out.converged = out.stationarity <= options.tolerance;
  out.iterations = it;
  out.value = f;
  out.x = std::move(x);
  return out;
}

SolveResult solve_two_step_continuous(const Instance& inst, const TwoStepParams& params,
                                      const SolveLimits& limits,
                                      const ContinuousOptions& options) {
  const Stopwatch clock;
  const Quantity radius = params.resolve_radius(inst);

  const ContinuousResult first = continuous_first_stage(inst, options);

  SolveLimits rest = limits;
  if (limits.time_limit_s > 0.0 && std::isfinite(limits.time_limit_s)) {
    rest.time_limit_s = limits.time_limit_s - clock.elapsed_ms() / 1000.0;
    if (rest.time_limit_s <= 0.0) {
      SolveResult r;
      r.algorithm = "two-step-continuous";
      r.status = SolveStatus::DncTime;
      r.wall_ms = clock.elapsed_ms();
      return r;
    }
  }
  SolveResult second = solve_bounded(inst, std::span<const double>(first.x), radius, rest);
  second.algorithm = "two-step-continuous";
  second.stage1_value = first.value;
  second.wall_ms = clock.elapsed_ms();
  return second;
}

}  // namespace lbs
