// lbs: simulate prices, solve instances, run benchmark grids and calibration
// tables. Talks to the solvers only through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lbs/lbs.h"

namespace {

using nlohmann::json;

enum ExitCode {
  kOk = 0,
  kFailure = 1,     // usage, i/o, internal
  kValidation = 2,  // instance, schedule or config rejected
  kDncTime = 3,
  kDncMemory = 4,
};

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(lbs_status status) {
  switch (status) {
    case LBS_OK: return kOk;
    case LBS_ERR_VALIDATION:
    case LBS_ERR_INFEASIBLE: return kValidation;
    default: return kFailure;
  }
}

void check(lbs_status status) {
  if (status != LBS_OK) throw CliError{exit_code_for(status), lbs_last_error()};
}

// Owns a string returned by the C API.
struct CString {
  char* ptr = nullptr;
  ~CString() { lbs_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kFailure, "cannot open '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw CliError{kFailure, "cannot write '" + path + "'"};
}

std::vector<double> parse_prices(const std::string& csv) {
  double* values = nullptr;
  std::size_t n = 0;
  check(lbs_price_csv_parse(csv.c_str(), &values, &n));
  std::vector<double> out(values, values + n);
  lbs_doubles_free(values);
  return out;
}

std::uint64_t parse_memory(const std::string& text) {
  if (text.empty()) return 0;
  std::uint64_t bytes = 0;
  if (lbs_parse_byte_size(text.c_str(), &bytes) != LBS_OK)
    throw CliError{kFailure, std::string("--memory-limit: ") + lbs_last_error()};
  return bytes;
}

// "auto" or empty means automatic grain.
std::optional<long long> parse_grain(const std::string& text) {
  if (text.empty() || text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const long long g = std::stoll(text, &used);
    if (used == text.size() && g >= 1) return g;
  } catch (const std::exception&) {
  }
  throw CliError{kFailure, "--grain must be a positive integer or 'auto'"};
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

// An unknown name is a usage error, not a validation failure.
lbs_algorithm parse_alg(const std::string& name) {
  lbs_algorithm alg{};
  if (lbs_parse_algorithm(name.c_str(), &alg) != LBS_OK)
    throw CliError{kFailure, "--alg: unknown algorithm '" + name + "'"};
  return alg;
}

struct SimulateArgs {
  double mu = 0.0;
  double sigma = 0.25;
  double p0 = 100.0;
  std::size_t steps = 1000;
  double dt = 0.0;
  std::size_t paths = 10;
  std::uint64_t seed = 0;
  std::size_t subsample = 0;
  long long block = 0;
  std::string prototype = "arctan";
  double beta = 0.9;
  double threshold = 0.99;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  CString csv;
  check(lbs_simulate_csv(a.mu, a.sigma, a.p0, a.steps, a.dt, a.paths, a.seed, a.subsample,
                         &csv.ptr));
  if (a.block <= 0) {
    emit(a.out, csv.str());
    return kOk;
  }
  // With --N the output is a full instance document.
  const std::vector<double> prices = parse_prices(csv.str());
  json doc = {{"T", prices.size()}, {"N", a.block},      {"beta", a.beta},
              {"prototype", a.prototype}, {"H", a.threshold}, {"L", a.block},
              {"prices", prices}};
  lbs_instance* check_inst = nullptr;
  check(lbs_instance_from_json(doc.dump().c_str(), &check_inst));
  lbs_instance_destroy(check_inst);
  emit(a.out, doc.dump(2) + "\n");
  return kOk;
}

struct SolveArgs {
  std::string instance;
  std::string prices;
  std::string alg = "two-step";
  std::string grain;
  long long lambda = 5;
  long long radius = 0;
  double time_limit = 0.0;
  std::string memory_limit;
  std::optional<std::uint64_t> seed;
  std::string prototype;
  std::optional<double> beta;
  std::optional<double> threshold;
  std::string out;
};

int run_solve(const SolveArgs& a) {
  json doc;
  try {
    doc = json::parse(read_file(a.instance));
  } catch (const json::parse_error& e) {
    throw CliError{kFailure, "instance JSON: " + std::string(e.what())};
  }
  if (!doc.is_object()) throw CliError{kFailure, "instance JSON must be an object"};
  if (!a.prices.empty()) {
    const std::vector<double> prices = parse_prices(read_file(a.prices));
    doc["prices"] = prices;
    doc["T"] = prices.size();
    doc.erase("generator");
  }
  if (!a.prototype.empty()) doc["prototype"] = a.prototype;
  if (a.beta) doc["beta"] = *a.beta;
  if (a.threshold) doc["H"] = *a.threshold;
  if (a.seed && doc.contains("generator") && doc["generator"].is_object())
    doc["generator"]["seed"] = *a.seed;

  const lbs_algorithm alg = parse_alg(a.alg);

  lbs_instance* inst = nullptr;
  check(lbs_instance_from_json(doc.dump().c_str(), &inst));
  std::unique_ptr<lbs_instance, decltype(&lbs_instance_destroy)> guard(inst, lbs_instance_destroy);

  lbs_solve_options options;
  lbs_solve_options_init(&options);
  options.grain = parse_grain(a.grain).value_or(0);
  options.lambda = a.lambda;
  options.radius = a.radius;
  options.time_limit_s = a.time_limit;
  options.memory_limit = parse_memory(a.memory_limit);

  lbs_result* result = nullptr;
  check(lbs_solve(inst, alg, &options, &result));
  std::unique_ptr<lbs_result, decltype(&lbs_result_destroy)> result_guard(result,
                                                                         lbs_result_destroy);
  CString text;
  check(lbs_result_to_json(result, &text.ptr));
  emit(a.out, text.str() + "\n");

  switch (lbs_result_outcome(result)) {
    case LBS_OUTCOME_DNC_TIME: return kDncTime;
    case LBS_OUTCOME_DNC_MEMORY: return kDncMemory;
    default: return kOk;
  }
}

struct BenchArgs {
  std::string grid = "1:2";
  std::string prototypes = "arctan";
  std::string modes = "cst";
  std::string algs = "fs,us,ils,ts1,ts2,exact,ub";
  std::string grain = "100";
  long long lambda = 5;
  long long radius = 0;
  double time_limit = 600.0;
  std::string memory_limit;
  std::uint64_t seed = 0;
  double beta = 0.9;
  double threshold = 0.99;
  std::size_t paths = 10;
  std::size_t workers = 1;
  std::string out;
  std::string markdown;
};

void write_reports(const CString& csv, const CString& md, const std::string& csv_path,
                   const std::string& md_path) {
  if (!csv_path.empty()) emit(csv_path, csv.str());
  // Markdown goes to stdout unless stdout already carries the CSV.
  if (!md_path.empty()) {
    emit(md_path, md.str());
  } else if (csv_path != "-") {
    emit("", md.str());
  }
}

int run_bench(const BenchArgs& a) {
  for (const auto& name : split(a.algs)) parse_alg(name);
  json config = {{"grid", split(a.grid)},
                 {"prototypes", split(a.prototypes)},
                 {"modes", split(a.modes)},
                 {"algorithms", split(a.algs)},
                 {"lambda", a.lambda},
                 {"time_limit", a.time_limit},
                 {"seed", a.seed},
                 {"beta", a.beta},
                 {"H", a.threshold},
                 {"paths", a.paths},
                 {"workers", a.workers}};
  const auto grain = parse_grain(a.grain);
  config["grain"] = grain ? json(*grain) : json("auto");
  if (a.radius > 0) config["radius"] = a.radius;
  if (!a.memory_limit.empty()) config["memory_limit"] = parse_memory(a.memory_limit);

  CString csv;
  CString md;
  check(lbs_bench_run(config.dump().c_str(), &csv.ptr, &md.ptr));
  write_reports(csv, md, a.out, a.markdown);
  return kOk;
}

struct CalibrateArgs {
  std::string prototypes = "all";
  std::string thresholds = "0.75,0.99";
  bool no_unit_eta = false;
  bool large = false;
  std::string grid;
  double beta = 0.9;
  double time_limit = 600.0;
  std::string memory_limit;
  std::size_t workers = 1;
  std::string out;
  std::string markdown;
};

int run_calibrate(const CalibrateArgs& a) {
  std::vector<double> hs;
  for (const auto& h : split(a.thresholds)) {
    try {
      hs.push_back(std::stod(h));
    } catch (const std::exception&) {
      throw CliError{kFailure, "--H expects a comma-separated list of numbers"};
    }
  }
  json config = {{"H", hs},
                 {"unit_eta", !a.no_unit_eta},
                 {"large", a.large},
                 {"prototypes", split(a.prototypes)},
                 {"beta", a.beta},
                 {"time_limit", a.time_limit},
                 {"workers", a.workers}};
  if (!a.grid.empty()) config["grid"] = split(a.grid);
  if (!a.memory_limit.empty()) config["memory_limit"] = parse_memory(a.memory_limit);

  CString csv;
  CString md;
  check(lbs_calibrate_run(config.dump().c_str(), &csv.ptr, &md.ptr));
  write_reports(csv, md, a.out, a.markdown);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large block sale: schedule the liquidation of a block over T steps."};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 1 usage or i/o error, 2 validation failure, 3 time limit (dnc), "
      "4 memory limit (dnc).\nDefault memory budget: $LBS_MEMORY_LIMIT, e.g. 4G.");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Averaged GBM price batch as CSV or instance JSON");
  simulate->add_option("--mu", sim.mu, "Drift")->capture_default_str();
  simulate->add_option("--sigma", sim.sigma, "Volatility")->capture_default_str();
  simulate->add_option("--p0", sim.p0, "Initial price")->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Path length before subsampling")->capture_default_str();
  simulate->add_option("--dt", sim.dt, "Step length (default 1/steps)");
  simulate->add_option("--paths", sim.paths, "Paths averaged")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Seed; path r uses seed + r")->capture_default_str();
  simulate->add_option("--T", sim.subsample, "Subsample the averaged path to T prices");
  simulate->add_option("--N", sim.block, "Emit an instance JSON with this block size");
  simulate->add_option("--prototype", sim.prototype, "Penalty prototype for --N")->capture_default_str();
  simulate->add_option("--beta", sim.beta, "Penalty range ratio c/p for --N")->capture_default_str();
  simulate->add_option("--H", sim.threshold, "Calibration threshold for --N")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output file (default stdout)");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Solve one instance and print the result JSON");
  solve->add_option("--instance", sol.instance, "Instance JSON file")->required();
  solve->add_option("--prices", sol.prices, "Price CSV replacing the instance prices");
  solve->add_option("--alg", sol.alg,
                    "exact, coarse, two-step, two-step-continuous, ils, fire-sale, uniform, "
                    "upper-bound")
      ->capture_default_str();
  solve->add_option("--grain", sol.grain, "Coarse grain P or 'auto' (default auto)");
  solve->add_option("--lambda", sol.lambda, "Funnel radius multiplier")->capture_default_str();
  solve->add_option("--radius", sol.radius, "Funnel radius, overrides lambda * P");
  solve->add_option("--time-limit", sol.time_limit, "Seconds, 0 for none")->capture_default_str();
  solve->add_option("--memory-limit", sol.memory_limit, "Bytes or 512M, 4G, ...");
  solve->add_option("--seed", sol.seed, "Overrides the seed of an instance price generator");
  solve->add_option("--prototype", sol.prototype, "Overrides the instance penalty prototype");
  solve->add_option("--beta", sol.beta, "Overrides the instance beta");
  solve->add_option("--H", sol.threshold, "Overrides the instance calibration threshold");
  solve->add_option("--out", sol.out, "Output file (default stdout)");

  BenchArgs ben;
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid; CSV rows and markdown tables");
  bench->add_option("--grid", ben.grid, "Comma list of a:b, (T, N) = (10^a, 10^b)")->capture_default_str();
  bench->add_option("--prototype", ben.prototypes, "Comma list or 'all'")->capture_default_str();
  bench->add_option("--modes", ben.modes, "Comma list of cst, avg, gbm:<mu>:<sigma>")->capture_default_str();
  bench->add_option("--alg", ben.algs, "Comma list of algorithms")->capture_default_str();
  bench->add_option("--grain", ben.grain, "Coarse grain P or 'auto'")->capture_default_str();
  bench->add_option("--lambda", ben.lambda, "Funnel radius multiplier")->capture_default_str();
  bench->add_option("--radius", ben.radius, "Funnel radius, overrides lambda * P");
  bench->add_option("--time-limit", ben.time_limit, "Seconds per run, 0 for none")->capture_default_str();
  bench->add_option("--memory-limit", ben.memory_limit, "Bytes or 512M, 4G, ...");
  bench->add_option("--seed", ben.seed, "Base seed for simulated prices")->capture_default_str();
  bench->add_option("--beta", ben.beta, "Penalty range ratio c/p")->capture_default_str();
  bench->add_option("--H", ben.threshold, "Calibration threshold")->capture_default_str();
  bench->add_option("--paths", ben.paths, "Paths per averaged batch")->capture_default_str();
  bench->add_option("--workers", ben.workers, "Concurrent cells; >1 marks timings unreliable")->capture_default_str();
  bench->add_option("--out", ben.out, "CSV output file");
  bench->add_option("--markdown", ben.markdown, "Markdown output file (default stdout)");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "FS and US gaps for several penalty scalings");
  calibrate->add_option("--prototype", cal.prototypes, "Comma list or 'all'")->capture_default_str();
  calibrate->add_option("--H", cal.thresholds, "Comma list of thresholds")->capture_default_str();
  calibrate->add_flag("--no-unit-eta", cal.no_unit_eta, "Skip the eta = 1 table");
  calibrate->add_flag("--large", cal.large, "Add the large instances (needs hours and GBs)");
  calibrate->add_option("--grid", cal.grid, "Comma list of a:b replacing the default grid");
  calibrate->add_option("--beta", cal.beta, "Penalty range ratio c/p")->capture_default_str();
  calibrate->add_option("--time-limit", cal.time_limit, "Seconds per exact solve")->capture_default_str();
  calibrate->add_option("--memory-limit", cal.memory_limit, "Bytes or 512M, 4G, ...");
  calibrate->add_option("--workers", cal.workers, "Concurrent cells")->capture_default_str();
  calibrate->add_option("--out", cal.out, "CSV output file");
  calibrate->add_option("--markdown", cal.markdown, "Markdown output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*solve) return run_solve(sol);
    if (*bench) return run_bench(ben);
    if (*calibrate) return run_calibrate(cal);
  } catch (const CliError& e) {
    std::cerr << "lbs: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "lbs: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
