#include <doctest.h>

#include <cmath>
#include <random>

#include "lbs/bounds.hpp"
#include "lbs/dp.hpp"
#include "lbs/local_search.hpp"
#include "lbs/prices.hpp"
#include "oracles.hpp"

using namespace lbs;

namespace {

Instance constant_instance(std::size_t steps, Quantity n, PenaltyPrototype kind = PenaltyPrototype::Arctan) {
  InstanceParams params;
  params.prototype = kind;
  return make_instance(n, std::vector<double>(steps, 100.0), params);
}

Instance gbm_instance(std::mt19937_64& rng, std::size_t steps, Quantity n, PenaltyPrototype kind) {
  const PriceBatch b = build_batch(0.1, 0.6, 100.0, steps * 5, 0.0, 2, rng());
  InstanceParams params;
  params.prototype = kind;
  return make_instance(n, subsample(b.averaged, steps), params);
}

double gap(double ub, double exact) { return 100.0 * (ub - exact) / exact; }

}  // namespace

TEST_CASE("x g(x) is convex for every prototype") {
  for (PenaltyPrototype kind : kAllPrototypes)
    for (Quantity n : {10, 1'000, 1'000'000}) {
      const Instance inst = constant_instance(10, n, kind);
      CHECK(check_xg_convexity(inst.penalty(), n));
      CHECK(upper_bound(inst).convexity_ok);
    }
}

TEST_CASE("a penalty with a concave stretch is rejected") {
  // h(x) = x (1 - e^-x) has h'' = (2 - x) e^-x < 0 beyond x = 2.
  const auto g = [](double x) { return 1.0 - std::exp(-x); };
  CHECK_FALSE(check_xg_convexity(g, 10.0));
  CHECK(check_xg_convexity(g, 1.5));
  const auto linear = [](double x) { return x; };
  CHECK(check_xg_convexity(linear, 100.0));
}

TEST_CASE("upper bound at (10, 100) sits 38.19 percent above the optimum") {
  const Instance inst = constant_instance(10, 100);
  const BoundReport b = upper_bound(inst);
  CHECK(b.pbar == 100.0);
  CHECK(b.cunder == doctest::Approx(90.0));
  CHECK(b.ub == doctest::Approx(100.0 * (100.0 - 90.0 * inst.penalty()(10.0))));
  CHECK(std::abs(gap(b.ub, solve_exact(inst).schedule->value) - 38.19) < 0.01);
}

TEST_CASE("upper bound dominates every schedule") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t steps = 1 + rng() % 8;
    const Quantity n = static_cast<Quantity>(steps + rng() % 300);
    const Instance inst = gbm_instance(rng, steps, n, kAllPrototypes[trial % 3]);
    const BoundReport b = upper_bound(inst);
    const double exact = solve_exact(inst).schedule->value;
    CHECK(fire_sale(inst).value <= exact * (1 + 1e-12));
    CHECK(uniform_sale(inst).value <= exact * (1 + 1e-12));
    CHECK(exact <= b.ub * (1 + 1e-12));
  }
}

TEST_CASE("relaxed gradient matches finite differences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t steps = 2 + rng() % 8;
    const Quantity n = static_cast<Quantity>(steps * (10 + rng() % 1000));
    const Instance inst = gbm_instance(rng, steps, n, kAllPrototypes[trial % 3]);
    std::vector<double> x(steps);
    std::uniform_real_distribution<double> u(1.0, static_cast<double>(n) / steps);
    for (double& v : x) v = u(rng);
    const auto grad = relaxed_gradient(inst, x);
    const auto grad_sep = separated_gradient(inst, x);
    const auto f = [&](const std::vector<double>& z) { return evaluate_relaxed(inst, z); };
    const auto fs = [&](const std::vector<double>& z) { return separated_objective(inst, z); };
    for (std::size_t j = 0; j < steps; ++j) {
      const double h = 1e-4 * std::max(1.0, x[j]);
      CHECK(grad[j] == doctest::Approx(oracle::central_difference(f, x, j, h)).epsilon(1e-5));
      CHECK(grad_sep[j] == doctest::Approx(oracle::central_difference(fs, x, j, h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("projection agrees with the sorting method") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z(0.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + rng() % 20;
    std::vector<double> v(dim);
    for (double& e : v) e = z(rng);
    const double total = 1.0 + static_cast<double>(rng() % 1000);
    const auto got = project_to_simplex(v, total);
    const auto want = oracle::project_sorted(v, total);
    double sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      CHECK(got[i] >= 0.0);
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9).scale(total));
      sum += got[i];
    }
    CHECK(sum == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("separated objective peaks at the uniform split for flat prices") {
  const Instance inst = constant_instance(10, 10'000);
  const std::vector<double> uniform(10, 1000.0);
  CHECK(separated_objective(inst, uniform) ==
        doctest::Approx(10'000.0 * (100.0 - 90.0 * inst.penalty()(1000.0))));
  CHECK(separated_objective(inst, uniform) == doctest::Approx(upper_bound(inst).ub));

  ContinuousOptions options;
  options.objective = ContinuousObjective::Separated;
  options.start = std::vector<double>{10'000.0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  const ContinuousResult r = continuous_first_stage(inst, options);
  CHECK(r.converged);
  for (double v : r.x) CHECK(std::abs(v - 1000.0) <= 0.5);
}

TEST_CASE("continuous stage is stationary and feasible") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t steps = 2 + rng() % 10;
    const Quantity n = static_cast<Quantity>(steps * (50 + rng() % 2000));
    const Instance inst = gbm_instance(rng, steps, n, kAllPrototypes[trial % 3]);
    const ContinuousResult r = continuous_first_stage(inst);
    CHECK(r.converged);
    double sum = 0.0;
    for (double v : r.x) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
    const std::vector<double> start(steps, static_cast<double>(n) / steps);
    CHECK(r.value >= evaluate_relaxed(inst, start) - 1e-9 * std::abs(r.value));
  }
}

TEST_CASE("continuous two-step with one step and with a wide funnel") {
  const Instance one = constant_instance(1, 500, PenaltyPrototype::Rational);
  const SolveResult r1 = solve_two_step_continuous(one);
  CHECK(r1.schedule->x == std::vector<Quantity>{500});

  std::mt19937_64 rng(8);
  const Instance inst = gbm_instance(rng, 10, 10'000, PenaltyPrototype::Sqrt);
  TwoStepParams params;
  params.radius = 500;
  const SolveResult ts2 = solve_two_step_continuous(inst, params);
  REQUIRE(ts2.schedule);
  CHECK(ts2.schedule->value == doctest::Approx(solve_exact(inst).schedule->value).epsilon(1e-12));
  CHECK(ts2.stage1_value);
}
