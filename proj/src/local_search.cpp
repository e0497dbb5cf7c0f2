#include "lbs/local_search.hpp"

#include <cmath>
#include <limits>

#include "lbs/errors.hpp"

namespace lbs {

Schedule fire_sale(const Instance& inst) {
  std::vector<Quantity> x(inst.steps(), 0);
  x.front() = inst.block();
  return make_schedule(inst, std::move(x));
}

Schedule uniform_sale(const Instance& inst) {
  const auto steps = static_cast<Quantity>(inst.steps());
  const Quantity share = inst.block() / steps;
  const Quantity extra = inst.block() % steps;
  std::vector<Quantity> x(inst.steps(), share);
  for (Quantity t = 0; t < extra; ++t) ++x[static_cast<std::size_t>(t)];
  return make_schedule(inst, std::move(x));
}

std::vector<Quantity> shift_sequence(Quantity block, const IlsConfig& config) {
  if (!config.dichotomy) {
    if (config.shift < 1) throw DomainError("ILS shift size must be at least 1");
    return {config.shift};
  }
  int levels = 0;
  while ((Quantity{2} << levels) <= block) ++levels;
  std::vector<Quantity> sizes;
  for (int r = levels; r >= 0; --r) sizes.push_back(Quantity{1} << r);
  return sizes;
}

double adjacent_shift_delta(const Instance& inst, const std::vector<Quantity>& x, std::size_t t,
                            Quantity sold_through_t, Quantity amount) {
  const Quantity first = x[t] + amount;
  const Quantity second = x[t + 1] - amount;
  if (first < 0 || second < 0) return std::numeric_limits<double>::quiet_NaN();
  // y_{t+1} is unchanged by the move, so its unit price is shared.
  const double y_next = static_cast<double>(sold_through_t + x[t + 1]);
  const double next_price = inst.unit_price(t + 1, y_next);
  const double before = inst.unit_price(t, static_cast<double>(sold_through_t)) *
                            static_cast<double>(x[t]) +
                        next_price * static_cast<double>(x[t + 1]);
  const double after = inst.unit_price(t, static_cast<double>(sold_through_t + amount)) *
                           static_cast<double>(first) +
                       next_price * static_cast<double>(second);
  return after - before;
}

SolveResult ils(const Instance& inst, const Schedule& start, const IlsConfig& config) {
  const Stopwatch clock;
  if (config.max_iterations < 1) throw DomainError("ILS needs max_iterations >= 1");
  std::vector<Quantity> x = start.x;
  double value = evaluate_objective(inst, x);

  const Deadline deadline(config.time_limit_s);
  std::uint64_t applied = 0;
  SolveStatus status = SolveStatus::LocalOptimum;
  const std::size_t steps = inst.steps();

  for (const Quantity shift : shift_sequence(inst.block(), config)) {
    while (true) {
      const double threshold = kIlsImprovementTolerance * std::abs(value);
      double best_gain = threshold;
      std::size_t best_t = steps;
      Quantity best_amount = 0;

      Quantity sold = 0;
      for (std::size_t t = 0; t + 1 < steps; ++t) {
        sold += x[t];
        // Try the forward shift first so an exact tie prefers selling earlier.
        for (const Quantity amount : {shift, -shift}) {
          const double gain = adjacent_shift_delta(inst, x, t, sold, amount);
          if (gain > best_gain) {
            best_gain = gain;
            best_t = t;
            best_amount = amount;
          }
        }
      }
      if (best_t == steps) break;  // fixed point for this shift size

      x[best_t] += best_amount;
      x[best_t + 1] -= best_amount;
      value += best_gain;
      ++applied;

      if (applied >= config.max_iterations) {
        status = SolveStatus::IterationCap;
        break;
      }
      if ((applied & 0xff) == 0 && deadline.expired()) {
        status = SolveStatus::TimeCap;
        break;
      }
    }
    if (status != SolveStatus::LocalOptimum) break;
  }

  SolveResult r;
  r.algorithm = "ils";
  r.status = status;
  r.schedule = make_schedule(inst, std::move(x));
  r.wall_ms = clock.elapsed_ms();
  return r;
}

}  // namespace lbs
