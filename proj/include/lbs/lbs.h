/* C interface to the large-block-sale solvers. */
#ifndef LBS_LBS_H
#define LBS_LBS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LBS_BUILDING_LIBRARY)
#    define LBS_API __declspec(dllexport)
#  else
#    define LBS_API __declspec(dllimport)
#  endif
#else
#  define LBS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct lbs_instance lbs_instance;
typedef struct lbs_result lbs_result;

typedef enum lbs_status {
  LBS_OK = 0,
  LBS_ERR_ARGUMENT = 1,   /* null pointer or out-of-range argument */
  LBS_ERR_VALIDATION = 2, /* instance or config failed validation */
  LBS_ERR_INFEASIBLE = 3, /* schedule does not sum to N or has negative entries */
  LBS_ERR_IO = 4,         /* unreadable file or malformed JSON */
  LBS_ERR_MEMORY = 5,     /* allocation failure outside a solver */
  LBS_ERR_INTERNAL = 6
} lbs_status;

typedef enum lbs_prototype {
  LBS_PROTOTYPE_RATIONAL = 0,
  LBS_PROTOTYPE_SQRT = 1,
  LBS_PROTOTYPE_ARCTAN = 2
} lbs_prototype;

typedef enum lbs_algorithm {
  LBS_ALG_FIRE_SALE = 0,
  LBS_ALG_UNIFORM = 1,
  LBS_ALG_ILS = 2,
  LBS_ALG_COARSE = 3,
  LBS_ALG_TWO_STEP = 4,
  LBS_ALG_TWO_STEP_CONTINUOUS = 5,
  LBS_ALG_EXACT = 6,
  LBS_ALG_UPPER_BOUND = 7
} lbs_algorithm;

/* How a solve ended. Separate from lbs_status: a DNC is a valid outcome. */
typedef enum lbs_outcome {
  LBS_OUTCOME_DONE = 0,
  LBS_OUTCOME_DNC_TIME = 1,
  LBS_OUTCOME_DNC_MEMORY = 2
} lbs_outcome;

typedef struct lbs_solve_options {
  int64_t grain;          /* 0: automatic grain */
  int64_t lambda;         /* funnel radius multiplier, default 5 */
  int64_t radius;         /* 0: lambda * grain */
  double time_limit_s;    /* <= 0: unlimited */
  uint64_t memory_limit;  /* bytes, 0: environment default */
  uint64_t ils_max_iterations;
} lbs_solve_options;

/* Message for the last failure on the calling thread, "" when none. */
LBS_API const char* lbs_last_error(void);
LBS_API const char* lbs_status_string(lbs_status status);

LBS_API void lbs_solve_options_init(lbs_solve_options* options);
/* Accepts canonical names (fire-sale, exact, ...) and short labels (FS, TS1, ...). */
LBS_API lbs_status lbs_parse_algorithm(const char* name, lbs_algorithm* out);

/* level <= 0 selects L = N; eta > 0 bypasses calibration. */
LBS_API lbs_status lbs_instance_create(int64_t block, const double* prices, size_t steps,
                                       lbs_prototype prototype, double beta, double threshold,
                                       double level, double eta, lbs_instance** out);
LBS_API lbs_status lbs_instance_from_json(const char* json, lbs_instance** out);
LBS_API lbs_status lbs_instance_load(const char* path, lbs_instance** out);
LBS_API void lbs_instance_destroy(lbs_instance* inst);

LBS_API size_t lbs_instance_steps(const lbs_instance* inst);
LBS_API int64_t lbs_instance_block(const lbs_instance* inst);
LBS_API double lbs_instance_eta(const lbs_instance* inst);

LBS_API lbs_status lbs_evaluate(const lbs_instance* inst, const int64_t* x, size_t length,
                                double* value);

/* options may be NULL for defaults. A DNC still returns LBS_OK with a result. */
LBS_API lbs_status lbs_solve(const lbs_instance* inst, lbs_algorithm algorithm,
                             const lbs_solve_options* options, lbs_result** out);
LBS_API void lbs_result_destroy(lbs_result* result);

LBS_API const char* lbs_result_algorithm(const lbs_result* result);
/* optimal, heuristic, local_optimum, iteration_cap, time_cap, dnc or bound */
LBS_API const char* lbs_result_status(const lbs_result* result);
LBS_API lbs_outcome lbs_result_outcome(const lbs_result* result);
LBS_API int lbs_result_has_value(const lbs_result* result);
LBS_API double lbs_result_value(const lbs_result* result);
LBS_API double lbs_result_wall_ms(const lbs_result* result);
/* Schedule length, 0 for DNC and upper-bound results. */
LBS_API size_t lbs_result_length(const lbs_result* result);
LBS_API const int64_t* lbs_result_x(const lbs_result* result);
LBS_API lbs_status lbs_result_to_json(const lbs_result* result, char** out);

/* Upper bound N [max p - min c g(N / T)]; convexity_ok may be NULL. */
LBS_API lbs_status lbs_upper_bound(const lbs_instance* inst, double* ub, int* convexity_ok);

/* Averaged GBM batch as price CSV. dt <= 0 selects 1 / steps; subsample_to = 0
   keeps every step. */
LBS_API lbs_status lbs_simulate_csv(double mu, double sigma, double p0, size_t steps, double dt,
                                    size_t paths, uint64_t seed, size_t subsample_to,
                                    char** csv_out);

/* Config JSON as documented in the README. Either output may be NULL. */
LBS_API lbs_status lbs_bench_run(const char* config_json, char** csv_out, char** markdown_out);
LBS_API lbs_status lbs_calibrate_run(const char* config_json, char** csv_out,
                                     char** markdown_out);

/* Parses single-column price CSV text (one header line). Free with lbs_doubles_free. */
LBS_API lbs_status lbs_price_csv_parse(const char* text, double** prices, size_t* length);
LBS_API void lbs_doubles_free(double* values);

/* "123", "512M", "24G" (binary multiples). */
LBS_API lbs_status lbs_parse_byte_size(const char* text, uint64_t* bytes);
/* Memory budget used when a limit is left at 0. */
LBS_API uint64_t lbs_default_memory_budget(void);

LBS_API void lbs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
