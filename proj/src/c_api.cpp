#include "lbs/lbs.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "lbs/bench.hpp"
#include "lbs/errors.hpp"
#include "lbs/io.hpp"
#include "lbs/prices.hpp"

struct lbs_instance {
  lbs::Instance inst;
  // Built once so repeated solves skip the g precomputation.
  std::optional<lbs::PenaltyTable> table;
};

struct lbs_result {
  lbs::RunOutcome outcome;
  std::string algorithm;
  std::string status;
};

static_assert(static_cast<int>(lbs::Algorithm::FireSale) == LBS_ALG_FIRE_SALE);
static_assert(static_cast<int>(lbs::Algorithm::TwoStepContinuous) == LBS_ALG_TWO_STEP_CONTINUOUS);
static_assert(static_cast<int>(lbs::Algorithm::UpperBound) == LBS_ALG_UPPER_BOUND);

namespace {

thread_local std::string last_error;

lbs_status fail(lbs_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs `body` and translates exceptions into status codes.
template <typename Body>
lbs_status guarded(Body body) {
  try {
    last_error.clear();
    return body();
  } catch (const lbs::ValidationError& e) {
    return fail(LBS_ERR_VALIDATION, e.what());
  } catch (const lbs::DomainError& e) {
    return fail(LBS_ERR_VALIDATION, e.what());
  } catch (const lbs::InfeasibleError& e) {
    return fail(LBS_ERR_INFEASIBLE, e.what());
  } catch (const lbs::IoError& e) {
    return fail(LBS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LBS_ERR_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(LBS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LBS_ERR_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lbs_instance* wrap(lbs::Instance inst) {
  auto* handle = new lbs_instance{std::move(inst), std::nullopt};
  handle->table = lbs::PenaltyTable::build(handle->inst.penalty(), handle->inst.block());
  return handle;
}

lbs::PenaltyPrototype to_prototype(lbs_prototype p) {
  switch (p) {
    case LBS_PROTOTYPE_RATIONAL: return lbs::PenaltyPrototype::Rational;
    case LBS_PROTOTYPE_SQRT: return lbs::PenaltyPrototype::Sqrt;
    case LBS_PROTOTYPE_ARCTAN: return lbs::PenaltyPrototype::Arctan;
  }
  throw lbs::DomainError("unknown penalty prototype");
}

}  // namespace

extern "C" {

const char* lbs_last_error(void) { return last_error.c_str(); }

const char* lbs_status_string(lbs_status status) {
  switch (status) {
    case LBS_OK: return "ok";
    case LBS_ERR_ARGUMENT: return "invalid argument";
    case LBS_ERR_VALIDATION: return "validation failed";
    case LBS_ERR_INFEASIBLE: return "infeasible schedule";
    case LBS_ERR_IO: return "i/o error";
    case LBS_ERR_MEMORY: return "out of memory";
    case LBS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void lbs_solve_options_init(lbs_solve_options* options) {
  if (!options) return;
  const lbs::AlgorithmOptions defaults;
  options->grain = 0;
  options->lambda = defaults.lambda;
  options->radius = 0;
  options->time_limit_s = 0.0;
  options->memory_limit = 0;
  options->ils_max_iterations = defaults.ils_max_iterations;
}

lbs_status lbs_parse_algorithm(const char* name, lbs_algorithm* out) {
  if (!name || !out) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = static_cast<lbs_algorithm>(lbs::parse_algorithm(name));
    return LBS_OK;
  });
}

lbs_status lbs_instance_create(int64_t block, const double* prices, size_t steps,
                               lbs_prototype prototype, double beta, double threshold,
                               double level, double eta, lbs_instance** out) {
  if (!out || (!prices && steps > 0)) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    lbs::InstanceParams params;
    params.prototype = to_prototype(prototype);
    params.beta = beta;
    params.threshold = threshold;
    if (level > 0.0) params.level = level;
    if (eta > 0.0) params.eta = eta;
    *out = wrap(lbs::make_instance(block, std::vector<double>(prices, prices + steps), params));
    return LBS_OK;
  });
}

lbs_status lbs_instance_from_json(const char* json, lbs_instance** out) {
  if (!json || !out) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(lbs::parse_instance_spec(json).build());
    return LBS_OK;
  });
}

lbs_status lbs_instance_load(const char* path, lbs_instance** out) {
  if (!path || !out) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = wrap(lbs::load_instance_file(path));
    return LBS_OK;
  });
}

void lbs_instance_destroy(lbs_instance* inst) { delete inst; }

size_t lbs_instance_steps(const lbs_instance* inst) { return inst ? inst->inst.steps() : 0; }
int64_t lbs_instance_block(const lbs_instance* inst) { return inst ? inst->inst.block() : 0; }
double lbs_instance_eta(const lbs_instance* inst) {
  return inst ? inst->inst.penalty().eta() : 0.0;
}

lbs_status lbs_evaluate(const lbs_instance* inst, const int64_t* x, size_t length,
                        double* value) {
  if (!inst || !value || (!x && length > 0)) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *value = lbs::evaluate_objective(inst->inst, std::span<const lbs::Quantity>(x, length));
    return LBS_OK;
  });
}

lbs_status lbs_solve(const lbs_instance* inst, lbs_algorithm algorithm,
                     const lbs_solve_options* options, lbs_result** out) {
  if (!inst || !out) return fail(LBS_ERR_ARGUMENT, "null argument");
  if (algorithm < LBS_ALG_FIRE_SALE || algorithm > LBS_ALG_UPPER_BOUND)
    return fail(LBS_ERR_ARGUMENT, "unknown algorithm");
  return guarded([&] {
    lbs::AlgorithmOptions opts;
    if (options) {
      if (options->grain < 0 || options->radius < 0 || options->lambda < 1)
        throw lbs::DomainError("grain and radius must be >= 0 and lambda >= 1");
      if (options->grain > 0) opts.grain = options->grain;
      opts.lambda = options->lambda;
      if (options->radius > 0) opts.radius = options->radius;
      if (options->time_limit_s > 0.0) opts.time_limit_s = options->time_limit_s;
      if (options->memory_limit > 0) opts.memory_limit_bytes = options->memory_limit;
      if (options->ils_max_iterations > 0) opts.ils_max_iterations = options->ils_max_iterations;
    }
    auto result = std::make_unique<lbs_result>();
    result->outcome = lbs::run_algorithm(inst->inst, static_cast<lbs::Algorithm>(algorithm), opts,
                                         inst->table ? &*inst->table : nullptr);
    result->algorithm = result->outcome.result.algorithm;
    result->status = result->outcome.status();
    *out = result.release();
    return LBS_OK;
  });
}

void lbs_result_destroy(lbs_result* result) { delete result; }

const char* lbs_result_algorithm(const lbs_result* result) {
  return result ? result->algorithm.c_str() : "";
}

const char* lbs_result_status(const lbs_result* result) {
  return result ? result->status.c_str() : "";
}

lbs_outcome lbs_result_outcome(const lbs_result* result) {
  if (!result) return LBS_OUTCOME_DONE;
  switch (result->outcome.result.status) {
    case lbs::SolveStatus::DncTime: return LBS_OUTCOME_DNC_TIME;
    case lbs::SolveStatus::DncMemory: return LBS_OUTCOME_DNC_MEMORY;
    default: return LBS_OUTCOME_DONE;
  }
}

int lbs_result_has_value(const lbs_result* result) {
  return result && result->outcome.value() ? 1 : 0;
}

double lbs_result_value(const lbs_result* result) {
  return result ? result->outcome.value().value_or(0.0) : 0.0;
}

double lbs_result_wall_ms(const lbs_result* result) {
  return result ? result->outcome.result.wall_ms : 0.0;
}

size_t lbs_result_length(const lbs_result* result) {
  if (!result || !result->outcome.result.schedule) return 0;
  return result->outcome.result.schedule->x.size();
}

const int64_t* lbs_result_x(const lbs_result* result) {
  if (!result || !result->outcome.result.schedule) return nullptr;
  return result->outcome.result.schedule->x.data();
}

lbs_status lbs_result_to_json(const lbs_result* result, char** out) {
  if (!result || !out) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = duplicate(result->outcome.to_json());
    return LBS_OK;
  });
}

lbs_status lbs_upper_bound(const lbs_instance* inst, double* ub, int* convexity_ok) {
  if (!inst || !ub) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const lbs::BoundReport report = lbs::upper_bound(inst->inst);
    *ub = report.ub;
    if (convexity_ok) *convexity_ok = report.convexity_ok ? 1 : 0;
    return LBS_OK;
  });
}

lbs_status lbs_simulate_csv(double mu, double sigma, double p0, size_t steps, double dt,
                            size_t paths, uint64_t seed, size_t subsample_to, char** csv_out) {
  if (!csv_out) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const lbs::PriceBatch batch = lbs::build_batch(mu, sigma, p0, steps, dt, paths, seed);
    std::ostringstream out;
    if (subsample_to > 0) {
      lbs::write_price_csv(out, lbs::subsample(batch.averaged, subsample_to));
    } else {
      lbs::write_price_csv(out, batch.averaged);
    }
    *csv_out = duplicate(out.str());
    return LBS_OK;
  });
}

lbs_status lbs_bench_run(const char* config_json, char** csv_out, char** markdown_out) {
  return guarded([&] {
    const lbs::BenchReport report =
        lbs::run_bench(lbs::parse_bench_config(config_json ? config_json : ""));
    char* csv = csv_out ? duplicate(report.csv()) : nullptr;
    if (markdown_out) {
      try {
        *markdown_out = duplicate(report.markdown());
      } catch (...) {
        std::free(csv);
        throw;
      }
    }
    if (csv_out) *csv_out = csv;
    return LBS_OK;
  });
}

lbs_status lbs_calibrate_run(const char* config_json, char** csv_out, char** markdown_out) {
  return guarded([&] {
    const lbs::CalibrationReport report =
        lbs::run_calibration(lbs::parse_calibration_config(config_json ? config_json : ""));
    char* csv = csv_out ? duplicate(report.csv()) : nullptr;
    if (markdown_out) {
      try {
        *markdown_out = duplicate(report.markdown());
      } catch (...) {
        std::free(csv);
        throw;
      }
    }
    if (csv_out) *csv_out = csv;
    return LBS_OK;
  });
}

lbs_status lbs_price_csv_parse(const char* text, double** prices, size_t* length) {
  if (!text || !prices || !length) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::istringstream in(text);
    const std::vector<double> values = lbs::read_price_csv(in);
    auto* out = static_cast<double*>(std::malloc(std::max<std::size_t>(values.size(), 1) *
                                                 sizeof(double)));
    if (!out) throw std::bad_alloc();
    std::copy(values.begin(), values.end(), out);
    *prices = out;
    *length = values.size();
    return LBS_OK;
  });
}

void lbs_doubles_free(double* values) { std::free(values); }

lbs_status lbs_parse_byte_size(const char* text, uint64_t* bytes) {
  if (!text || !bytes) return fail(LBS_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *bytes = lbs::parse_byte_size(text);
    return LBS_OK;
  });
}

uint64_t lbs_default_memory_budget(void) { return lbs::default_memory_budget(); }

void lbs_string_free(char* s) { std::free(s); }

}  // extern "C"
