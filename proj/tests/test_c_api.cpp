#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "lbs/lbs.h"

namespace {

lbs_instance* flat_instance(int64_t n, size_t steps, lbs_prototype proto = LBS_PROTOTYPE_ARCTAN) {
  const std::vector<double> prices(steps, 100.0);
  lbs_instance* inst = nullptr;
  REQUIRE(lbs_instance_create(n, prices.data(), steps, proto, 0.9, 0.99, 0.0, 0.0, &inst) == LBS_OK);
  return inst;
}

std::string take(char* s) {
  std::string out(s);
  lbs_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("create, solve and read back a schedule") {
  lbs_instance* inst = flat_instance(100, 10);
  CHECK(lbs_instance_steps(inst) == 10);
  CHECK(lbs_instance_block(inst) == 100);
  CHECK(lbs_instance_eta(inst) > 0.0);

  lbs_result* r = nullptr;
  REQUIRE(lbs_solve(inst, LBS_ALG_EXACT, nullptr, &r) == LBS_OK);
  CHECK(lbs_result_outcome(r) == LBS_OUTCOME_DONE);
  CHECK(std::string(lbs_result_algorithm(r)) == "exact");
  CHECK(std::string(lbs_result_status(r)) == "optimal");
  REQUIRE(lbs_result_has_value(r));
  CHECK(lbs_result_value(r) == doctest::Approx(1369.705).epsilon(1e-6));
  REQUIRE(lbs_result_length(r) == 10);
  const int64_t* x = lbs_result_x(r);
  const std::vector<int64_t> expected{1, 1, 1, 2, 3, 5, 9, 14, 24, 40};
  CHECK(std::vector<int64_t>(x, x + 10) == expected);

  double v = 0.0;
  REQUIRE(lbs_evaluate(inst, x, 10, &v) == LBS_OK);
  CHECK(v == doctest::Approx(lbs_result_value(r)));

  char* json = nullptr;
  REQUIRE(lbs_result_to_json(r, &json) == LBS_OK);
  const std::string text = take(json);
  CHECK(text.rfind("{\"algorithm\":\"exact\",\"x\":[1,1,1,2,3,5,9,14,24,40]", 0) == 0);
  lbs_result_destroy(r);

  double ub = 0.0;
  int convex = 0;
  REQUIRE(lbs_upper_bound(inst, &ub, &convex) == LBS_OK);
  CHECK(convex == 1);
  CHECK(100.0 * (ub - 1369.705) / 1369.705 == doctest::Approx(38.19).epsilon(1e-3));
  lbs_instance_destroy(inst);
}

TEST_CASE("every algorithm runs through the handle") {
  lbs_instance* inst = flat_instance(1000, 10, LBS_PROTOTYPE_SQRT);
  lbs_solve_options opts;
  lbs_solve_options_init(&opts);
  CHECK(opts.lambda == 5);
  opts.grain = 10;
  double exact = 0.0;
  {
    lbs_result* r = nullptr;
    REQUIRE(lbs_solve(inst, LBS_ALG_EXACT, &opts, &r) == LBS_OK);
    exact = lbs_result_value(r);
    lbs_result_destroy(r);
  }
  for (int a = LBS_ALG_FIRE_SALE; a <= LBS_ALG_UPPER_BOUND; ++a) {
    lbs_result* r = nullptr;
    REQUIRE(lbs_solve(inst, static_cast<lbs_algorithm>(a), &opts, &r) == LBS_OK);
    REQUIRE(lbs_result_has_value(r));
    if (a == LBS_ALG_UPPER_BOUND) {
      CHECK(std::string(lbs_result_status(r)) == "bound");
      CHECK(lbs_result_length(r) == 0);
      CHECK(lbs_result_value(r) >= exact);
    } else {
      CHECK(lbs_result_length(r) == 10);
      CHECK(lbs_result_value(r) <= exact * (1 + 1e-12));
    }
    lbs_result_destroy(r);
  }
  lbs_instance_destroy(inst);
}

TEST_CASE("errors carry a status and a message") {
  lbs_instance* inst = nullptr;
  const double prices[2] = {100.0, -1.0};
  CHECK(lbs_instance_create(5, prices, 2, LBS_PROTOTYPE_ARCTAN, 0.9, 0.99, 0, 0, &inst) ==
        LBS_ERR_VALIDATION);
  CHECK(inst == nullptr);
  CHECK(std::strlen(lbs_last_error()) > 0);
  CHECK(lbs_instance_create(5, prices, 2, LBS_PROTOTYPE_ARCTAN, 0.9, 0.99, 0, 0, nullptr) ==
        LBS_ERR_ARGUMENT);
  CHECK(lbs_instance_from_json("{oops", &inst) == LBS_ERR_IO);
  CHECK(lbs_instance_from_json(R"({"T":2,"N":1,"prices":[1,1]})", &inst) == LBS_ERR_VALIDATION);
  CHECK(lbs_instance_load("/nonexistent.json", &inst) == LBS_ERR_IO);

  lbs_instance* ok = flat_instance(10, 2);
  const int64_t bad[2] = {3, 3};
  double v = 0.0;
  CHECK(lbs_evaluate(ok, bad, 2, &v) == LBS_ERR_INFEASIBLE);
  CHECK(std::string(lbs_status_string(LBS_ERR_INFEASIBLE)).size() > 0);
  lbs_instance_destroy(ok);

  lbs_algorithm alg;
  CHECK(lbs_parse_algorithm("TS1", &alg) == LBS_OK);
  CHECK(alg == LBS_ALG_TWO_STEP);
  CHECK(lbs_parse_algorithm("magic", &alg) == LBS_ERR_VALIDATION);
}

TEST_CASE("a DNC is a successful call with a DNC outcome") {
  lbs_instance* inst = flat_instance(10'000, 10);
  lbs_solve_options opts;
  lbs_solve_options_init(&opts);
  opts.memory_limit = 4096;
  lbs_result* r = nullptr;
  REQUIRE(lbs_solve(inst, LBS_ALG_EXACT, &opts, &r) == LBS_OK);
  CHECK(lbs_result_outcome(r) == LBS_OUTCOME_DNC_MEMORY);
  CHECK_FALSE(lbs_result_has_value(r));
  CHECK(lbs_result_length(r) == 0);
  char* json = nullptr;
  REQUIRE(lbs_result_to_json(r, &json) == LBS_OK);
  CHECK(take(json).find("\"status\":\"dnc\"") != std::string::npos);
  lbs_result_destroy(r);

  lbs_solve_options_init(&opts);
  opts.time_limit_s = 1e-4;
  lbs_instance* big = flat_instance(30'000, 10);
  REQUIRE(lbs_solve(big, LBS_ALG_EXACT, &opts, &r) == LBS_OK);
  CHECK(lbs_result_outcome(r) == LBS_OUTCOME_DNC_TIME);
  lbs_result_destroy(r);
  lbs_instance_destroy(big);
  lbs_instance_destroy(inst);
}

TEST_CASE("price CSV, simulation and byte sizes") {
  double* prices = nullptr;
  size_t n = 0;
  REQUIRE(lbs_price_csv_parse("price\r\n100\r\n101.5\r\n", &prices, &n) == LBS_OK);
  REQUIRE(n == 2);
  CHECK(prices[1] == 101.5);
  lbs_doubles_free(prices);
  CHECK(lbs_price_csv_parse("price\nabc\n", &prices, &n) != LBS_OK);

  char* csv = nullptr;
  REQUIRE(lbs_simulate_csv(0.0, 0.25, 100.0, 1000, 0.0, 10, 7, 10, &csv) == LBS_OK);
  const std::string text = take(csv);
  REQUIRE(lbs_price_csv_parse(text.c_str(), &prices, &n) == LBS_OK);
  CHECK(n == 10);
  lbs_doubles_free(prices);

  uint64_t bytes = 0;
  REQUIRE(lbs_parse_byte_size("512M", &bytes) == LBS_OK);
  CHECK(bytes == 512ull << 20);
  CHECK(lbs_parse_byte_size("lots", &bytes) != LBS_OK);
  CHECK(lbs_default_memory_budget() > 0);
}

TEST_CASE("bench and calibrate through JSON configs") {
  char* csv = nullptr;
  char* md = nullptr;
  REQUIRE(lbs_bench_run(R"({"grid":["1:2"],"algorithms":["fs","exact"]})", &csv, &md) == LBS_OK);
  CHECK(take(csv).rfind("instance_id,T,N,", 0) == 0);
  CHECK(take(md).find("20.42") != std::string::npos);
  CHECK(lbs_bench_run(R"({"grid":["x"]})", &csv, nullptr) == LBS_ERR_VALIDATION);
  REQUIRE(lbs_calibrate_run(R"({"grid":["1:2"],"prototypes":["arctan"]})", nullptr, &md) == LBS_OK);
  CHECK(take(md).find("η_0.99") != std::string::npos);
}
