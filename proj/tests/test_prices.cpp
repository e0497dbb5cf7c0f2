#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "lbs/errors.hpp"
#include "lbs/prices.hpp"

using namespace lbs;

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("normal source has unit moments") {
  NormalSource z(2024);
  std::vector<double> draws(400'000);
  for (auto& d : draws) d = z.next();
  const double se = 1.0 / std::sqrt(static_cast<double>(draws.size()));
  CHECK(std::abs(mean(draws)) < 4.0 * se);
  CHECK(variance(draws) == doctest::Approx(1.0).epsilon(0.01));
  for (double d : draws) CHECK(std::isfinite(d));
}

TEST_CASE("zero volatility and drift gives a flat path") {
  GbmSpec spec;
  spec.p0 = 100.0;
  spec.steps = 50;
  const auto path = simulate_gbm(spec);
  REQUIRE(path.size() == 50);
  for (double s : path) CHECK(s == 100.0);
}

TEST_CASE("drift-only path is exponential") {
  GbmSpec spec;
  spec.p0 = 100.0;
  spec.mu = 0.05;
  spec.steps = 40;
  spec.dt = 1.0;
  const auto path = simulate_gbm(spec);
  for (std::size_t k = 0; k < path.size(); ++k)
    CHECK(path[k] == doctest::Approx(100.0 * std::exp(0.05 * static_cast<double>(k + 1))).epsilon(1e-12));
}

TEST_CASE("default step length spans one unit of time") {
  GbmSpec spec;
  spec.steps = 250;
  CHECK(spec.step_length() == doctest::Approx(1.0 / 250.0));
  spec.dt = 0.5;
  CHECK(spec.step_length() == 0.5);
}

TEST_CASE("paths are reproducible and positive") {
  GbmSpec spec;
  spec.sigma = 0.7;
  spec.mu = -0.05;
  spec.seed = 99;
  const auto a = simulate_gbm(spec);
  const auto b = simulate_gbm(spec);
  CHECK(a == b);
  spec.seed = 100;
  CHECK(simulate_gbm(spec) != a);
  for (double s : a) CHECK(s > 0.0);
}

TEST_CASE("log returns follow the lognormal law") {
  const double mu = 0.0;
  const double sigma = 0.25;
  const std::size_t paths = 10'000;
  std::vector<double> r(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    GbmSpec spec{100.0, mu, sigma, 1000, 0.0, 5'000'000 + i};
    r[i] = std::log(simulate_gbm(spec).back() / 100.0);
  }
  const double horizon = 1.0;
  const double expected_mean = (mu - 0.5 * sigma * sigma) * horizon;
  const double expected_var = sigma * sigma * horizon;
  CHECK(std::abs(mean(r) - expected_mean) < 3.0 * std::sqrt(expected_var / paths));
  CHECK(variance(r) == doctest::Approx(expected_var).epsilon(0.10));
}

TEST_CASE("batch uses consecutive sub-seeds and averages pointwise") {
  const PriceBatch batch = build_batch(0.05, 0.25, 100.0, 200, 0.0, 4, 17);
  REQUIRE(batch.paths.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    GbmSpec spec{100.0, 0.05, 0.25, 200, 0.0, 17 + r};
    CHECK(batch.paths[r] == simulate_gbm(spec));
  }
  for (std::size_t t = 0; t < 200; ++t) {
    double sum = 0.0;
    for (const auto& p : batch.paths) sum += p[t];
    CHECK(batch.averaged[t] == doctest::Approx(sum / 4.0).epsilon(1e-15));
  }
  const PriceBatch again = build_batch(0.05, 0.25, 100.0, 200, 0.0, 4, 17);
  CHECK(again.averaged == batch.averaged);
}

TEST_CASE("single-path batch equals its path") {
  const PriceBatch batch = build_batch(0.0, 0.1, 100.0, 64, 0.0, 1, 3);
  CHECK(batch.averaged == batch.paths.front());
  CHECK_THROWS_AS(build_batch(0.0, 0.1, 100.0, 64, 0.0, 0, 3), DomainError);
}

TEST_CASE("averaging ten paths divides the variance by ten") {
  const std::size_t reps = 100;
  std::vector<double> averaged_end;
  std::vector<double> single_end;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const PriceBatch b = build_batch(0.0, 0.10, 100.0, 1000, 0.0, 10, 1000 * rep);
    averaged_end.push_back(b.averaged.back());
    for (const auto& p : b.paths) single_end.push_back(p.back());
  }
  const double ratio = variance(averaged_end) / variance(single_end);
  CHECK(ratio > 0.06);
  CHECK(ratio < 0.15);
}

TEST_CASE("subsample picks every stride-th entry") {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  const auto ten = subsample(v, 10);
  REQUIRE(ten.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(ten[i] == static_cast<double>(100 * (i + 1)));
  const auto hundred = subsample(v, 100);
  REQUIRE(hundred.size() == 100);
  CHECK(hundred.front() == 10.0);
  CHECK(hundred.back() == 1000.0);
  CHECK(subsample(v, 1000) == v);
  CHECK_THROWS_AS(subsample(v, 7), DomainError);
  CHECK_THROWS_AS(subsample(v, 0), DomainError);
}

TEST_CASE("moment grid covers drift times volatility") {
  CHECK(std::size(kMomentGrid) == 9);
  for (double mu : {-0.05, 0.0, 0.05})
    for (double sigma : {0.10, 0.25, 0.70}) {
      int hits = 0;
      for (const auto& m : kMomentGrid) hits += (m.mu == mu && m.sigma == sigma);
      CHECK(hits == 1);
    }
}

TEST_CASE("price CSV round trip") {
  const PriceBatch b = build_batch(0.0, 0.7, 100.0, 30, 0.0, 3, 8);
  std::ostringstream out;
  write_price_csv(out, b.averaged);
  CHECK(out.str().rfind("price\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_price_csv(in) == b.averaged);
}

TEST_CASE("price CSV reader accepts CRLF and quoting, rejects junk") {
  std::istringstream ok("p\r\n\"101.5\"\r\n99\r\n\r\n");
  CHECK(read_price_csv(ok) == std::vector<double>{101.5, 99.0});
  std::istringstream junk("p\n100\nabc\n");
  CHECK_THROWS_AS(read_price_csv(junk), IoError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_price_csv(empty), IoError);
}

TEST_CASE("gbm spec validation") {
  GbmSpec spec;
  spec.sigma = -1.0;
  CHECK_THROWS_AS(simulate_gbm(spec), DomainError);
  spec = GbmSpec{};
  spec.p0 = 0.0;
  CHECK_THROWS_AS(simulate_gbm(spec), DomainError);
  spec = GbmSpec{};
  spec.steps = 0;
  CHECK_THROWS_AS(simulate_gbm(spec), DomainError);
}
