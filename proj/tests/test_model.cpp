#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lbs/errors.hpp"
#include "lbs/model.hpp"
#include "oracles.hpp"

using namespace lbs;

namespace {

// Root of G(x) = h by bisection, independent of the closed-form inverses.
double bisect_inverse(PenaltyPrototype kind, double h) {
  double lo = 0.0;
  double hi = 1.0;
  while (prototype_value(kind, hi) < h) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (prototype_value(kind, mid) < h ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Instance constant_instance(std::size_t steps, Quantity n, PenaltyPrototype kind,
                           double beta = 0.9) {
  InstanceParams params;
  params.prototype = kind;
  params.beta = beta;
  return make_instance(n, std::vector<double>(steps, 100.0), params);
}

}  // namespace

TEST_CASE("prototypes vanish at zero, increase and stay below one") {
  for (PenaltyPrototype kind : kAllPrototypes) {
    CAPTURE(to_string(kind));
    CHECK(prototype_value(kind, 0.0) == 0.0);
    double prev = 0.0;
    for (double x = 1e-6; x < 1e12; x *= 1.7) {
      const double g = prototype_value(kind, x);
      CHECK(g > prev);
      CHECK(g < 1.0);
      prev = g;
    }
  }
}

TEST_CASE("sqrt prototype agrees with its textbook form") {
  for (double x : {1e-3, 0.5, 3.0, 48.0, 1e4}) {
    const double textbook = 1.0 - 2.0 / (1.0 + std::sqrt(1.0 + x));
    CHECK(prototype_value(PenaltyPrototype::Sqrt, x) == doctest::Approx(textbook).epsilon(1e-14));
  }
}

TEST_CASE("inverses are exact") {
  for (PenaltyPrototype kind : kAllPrototypes) {
    for (double h = 0.01; h < 1.0; h += 0.01) {
      CAPTURE(h);
      CHECK(std::abs(prototype_value(kind, prototype_inverse(kind, h)) - h) <= 1e-12);
    }
  }
}

TEST_CASE("derivatives match central differences") {
  for (PenaltyPrototype kind : kAllPrototypes) {
    for (double x : {1e-2, 0.3, 1.0, 7.0, 120.0}) {
      const double h = 1e-6 * std::max(1.0, x);
      const double fd =
          (prototype_value(kind, x + h) - prototype_value(kind, x - h)) / (2.0 * h);
      CHECK(prototype_derivative(kind, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("calibration examples") {
  CHECK(calibrate_eta(PenaltyPrototype::Rational, 100.0, 0.5) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(calibrate_eta(PenaltyPrototype::Sqrt, 1000.0, 0.75) == doctest::Approx(0.048).epsilon(1e-14));
  CHECK(calibrate_eta(PenaltyPrototype::Sqrt, 1000.0, 0.75) ==
        doctest::Approx(bisect_inverse(PenaltyPrototype::Sqrt, 0.75) / 1000.0).epsilon(1e-12));
  const double n = 1000.0;
  const double eta = calibrate_eta(PenaltyPrototype::Arctan, n, 0.99);
  CHECK(eta == doctest::Approx(std::tan(0.99 * std::numbers::pi / 2.0) / n).epsilon(1e-14));
  CHECK(std::abs(prototype_value(PenaltyPrototype::Arctan, eta * n) - 0.99) <= 1e-12);
}

TEST_CASE("calibration round trip over prototypes, thresholds and levels") {
  for (PenaltyPrototype kind : kAllPrototypes)
    for (double h : {0.5, 0.75, 0.99})
      for (double level : {1e2, 1e6}) {
        const double eta = calibrate_eta(kind, level, h);
        CHECK(std::abs(prototype_value(kind, eta * level) - h) <= 1e-10);
        CHECK(eta * level == doctest::Approx(bisect_inverse(kind, h)).epsilon(1e-9));
      }
}

TEST_CASE("calibration rejects out-of-domain arguments") {
  CHECK_THROWS_AS(calibrate_eta(PenaltyPrototype::Arctan, 100.0, 0.0), DomainError);
  CHECK_THROWS_AS(calibrate_eta(PenaltyPrototype::Arctan, 100.0, 1.0), DomainError);
  CHECK_THROWS_AS(calibrate_eta(PenaltyPrototype::Arctan, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(calibrate_eta(PenaltyPrototype::Arctan, -3.0, 0.5), DomainError);
  CHECK_THROWS_AS(PenaltyFunction(PenaltyPrototype::Sqrt, 0.0), DomainError);
  CHECK_THROWS_AS(parse_prototype("cubic"), DomainError);
  CHECK(parse_prototype("ArcTan") == PenaltyPrototype::Arctan);
}

TEST_CASE("penalty increases over integer quantities") {
  for (PenaltyPrototype kind : kAllPrototypes) {
    const PenaltyFunction g(kind, calibrate_eta(kind, 1e5, 0.99));
    CHECK(g(0.0) == 0.0);
    double prev = 0.0;
    for (double y = 1.0; y <= 1e5; y = std::ceil(y * 1.3)) {
      CHECK(g(y) > prev);
      prev = g(y);
    }
  }
}

TEST_CASE("penalty table matches on-demand evaluation") {
  const PenaltyFunction g(PenaltyPrototype::Rational, 0.003);
  const auto table = PenaltyTable::build(g, 1000);
  REQUIRE(table);
  CHECK(table->size() == 1001);
  for (Quantity y : {0, 1, 17, 999, 1000}) CHECK((*table)[y] == g(static_cast<double>(y)));
  CHECK_FALSE(PenaltyTable::build(g, PenaltyTable::kMaxEntries + 1));
}

TEST_CASE("make_instance sets c = beta p") {
  const Instance inst = constant_instance(4, 40, PenaltyPrototype::Arctan);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(inst.price(t) == 100.0);
    CHECK(inst.range(t) == doctest::Approx(90.0));
  }
  CHECK(inst.penalty().eta() ==
        doctest::Approx(calibrate_eta(PenaltyPrototype::Arctan, 40.0, 0.99)));
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(make_instance(5, std::vector<double>(6, 100.0)), ValidationError);
  CHECK_THROWS_AS(make_instance(0, std::vector<double>(1, 100.0)), ValidationError);
  CHECK_THROWS_AS(make_instance(5, std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(make_instance(5, std::vector<double>{100.0, -1.0}), ValidationError);
  InstanceParams params;
  params.beta = 1.0;
  CHECK_THROWS_AS(make_instance(5, std::vector<double>(2, 100.0), params), ValidationError);
  const PenaltyFunction g(PenaltyPrototype::Arctan, 1.0);
  CHECK_THROWS_AS(Instance(5, {100.0, 100.0}, {90.0, 100.0}, g), ValidationError);
  CHECK_THROWS_AS(Instance(5, {100.0, 100.0}, {90.0}, g), ValidationError);
}

TEST_CASE("objective closed forms") {
  const Instance one = constant_instance(1, 50, PenaltyPrototype::Sqrt);
  const std::vector<Quantity> all{50};
  CHECK(evaluate_objective(one, all) ==
        doctest::Approx((100.0 - 90.0 * one.penalty()(50.0)) * 50.0));

  const Instance inst = constant_instance(5, 50, PenaltyPrototype::Rational);
  for (std::size_t j = 0; j < 5; ++j) {
    std::vector<Quantity> x(5, 0);
    x[j] = 50;
    CHECK(evaluate_objective(inst, x) ==
          doctest::Approx((100.0 - 90.0 * inst.penalty()(50.0)) * 50.0));
  }
}

TEST_CASE("two-step two-unit instance by hand") {
  InstanceParams params;
  params.level = 2.0;
  const Instance inst = make_instance(2, {100.0, 100.0}, params);
  const PenaltyFunction& g = inst.penalty();
  const double x11 = (100.0 - 90.0 * g(1.0)) + (100.0 - 90.0 * g(2.0));
  const double x20 = (100.0 - 90.0 * g(2.0)) * 2.0;
  const double x02 = (100.0 - 90.0 * g(2.0)) * 2.0;
  CHECK(evaluate_objective(inst, std::vector<Quantity>{1, 1}) == doctest::Approx(x11));
  CHECK(evaluate_objective(inst, std::vector<Quantity>{2, 0}) == doctest::Approx(x20));
  CHECK(evaluate_objective(inst, std::vector<Quantity>{0, 2}) == doctest::Approx(x02));
  CHECK(x11 > x20);
}

TEST_CASE("objective rejects infeasible schedules") {
  const Instance inst = constant_instance(3, 10, PenaltyPrototype::Arctan);
  CHECK_THROWS_AS(evaluate_objective(inst, std::vector<Quantity>{5, 5}), InfeasibleError);
  CHECK_THROWS_AS(evaluate_objective(inst, std::vector<Quantity>{5, 5, 1}), InfeasibleError);
  CHECK_THROWS_AS(evaluate_objective(inst, std::vector<Quantity>{12, -1, -1}), InfeasibleError);
}

TEST_CASE("objective is bracketed by ceiling and floor prices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t steps = 1 + rng() % 20;
    const Quantity n = static_cast<Quantity>(steps + rng() % 500);
    std::vector<double> prices(steps);
    for (auto& p : prices) p = 50.0 + static_cast<double>(rng() % 1000) / 10.0;
    InstanceParams params;
    params.prototype = kAllPrototypes[trial % 3];
    params.beta = 0.5 + 0.4 * static_cast<double>(rng() % 100) / 100.0;
    const Instance inst = make_instance(n, prices, params);
    const auto x = oracle::random_composition(rng, steps, n);
    double ceiling = 0.0;
    double floor = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      ceiling += inst.price(t) * static_cast<double>(x[t]);
      floor += (inst.price(t) - inst.range(t)) * static_cast<double>(x[t]);
    }
    const double f = evaluate_objective(inst, x);
    CHECK(f <= ceiling * (1 + 1e-12));
    CHECK(f >= floor * (1 - 1e-12));
    CHECK(f == doctest::Approx(oracle::objective(inst, x)).epsilon(1e-12));
  }
}

TEST_CASE("relaxed objective agrees on integer points") {
  const Instance inst = constant_instance(4, 20, PenaltyPrototype::Sqrt);
  const std::vector<Quantity> x{3, 7, 0, 10};
  const std::vector<double> xr(x.begin(), x.end());
  CHECK(evaluate_relaxed(inst, xr) == doctest::Approx(evaluate_objective(inst, x)));
  const Schedule s = make_schedule(inst, x);
  CHECK(s.value == doctest::Approx(evaluate_objective(inst, x)));
}
