#include "lbs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "lbs/errors.hpp"
#include "lbs/io.hpp"
#include "lbs/prices.hpp"

namespace lbs {

using nlohmann::json;

namespace {

std::string lower_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string power_of_ten(double v) {
  const double e = std::log10(v);
  if (v >= 10.0 && std::abs(e - std::round(e)) < 1e-12)
    return "10^" + std::to_string(static_cast<int>(std::round(e)));
  return number(v);
}

// RFC 4180: quote when the field holds a comma, quote or line break.
std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\r\n";
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : ""; }

std::string md_row(const std::vector<std::string>& cells) {
  std::string line = "|";
  for (const auto& c : cells) line += " " + c + " |";
  return line + "\n";
}

std::string md_rule(std::size_t columns) {
  std::string line = "|";
  for (std::size_t i = 0; i < columns; ++i) line += "---|";
  return line + "\n";
}

// Runs task(i) for i in [0, count) on `workers` threads. The first exception
// is rethrown once every worker has stopped.
template <typename Task>
void parallel_for(std::size_t count, std::size_t workers, Task task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> simulated_prices(double mu, double sigma, double p0, std::size_t steps,
                                     std::size_t t_max, std::size_t paths, std::uint64_t seed) {
  // The path length must be a multiple of T for subsampling.
  const std::size_t length = std::max<std::size_t>(1, (t_max + steps - 1) / steps) * steps;
  const PriceBatch batch = build_batch(mu, sigma, p0, length, 0.0, paths, seed);
  return subsample(batch.averaged, steps);
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  static const std::map<std::string, Algorithm> names = {
      {"fire-sale", Algorithm::FireSale},
      {"fs", Algorithm::FireSale},
      {"uniform", Algorithm::Uniform},
      {"uniform-sale", Algorithm::Uniform},
      {"us", Algorithm::Uniform},
      {"ils", Algorithm::Ils},
      {"coarse", Algorithm::Coarse},
      {"cg", Algorithm::Coarse},
      {"two-step", Algorithm::TwoStep},
      {"ts1", Algorithm::TwoStep},
      {"two-step-continuous", Algorithm::TwoStepContinuous},
      {"ts2", Algorithm::TwoStepContinuous},
      {"exact", Algorithm::Exact},
      {"dp", Algorithm::Exact},
      {"upper-bound", Algorithm::UpperBound},
      {"ub", Algorithm::UpperBound},
  };
  const auto it = names.find(lower_case(name));
  if (it == names.end()) throw DomainError("unknown algorithm '" + std::string(name) + "'");
  return it->second;
}

std::string_view algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::FireSale: return "fire-sale";
    case Algorithm::Uniform: return "uniform";
    case Algorithm::Ils: return "ils";
    case Algorithm::Coarse: return "coarse";
    case Algorithm::TwoStep: return "two-step";
    case Algorithm::TwoStepContinuous: return "two-step-continuous";
    case Algorithm::Exact: return "exact";
    case Algorithm::UpperBound: return "upper-bound";
  }
  return "unknown";
}

std::string_view algorithm_label(Algorithm alg) {
  switch (alg) {
    case Algorithm::FireSale: return "FS";
    case Algorithm::Uniform: return "US";
    case Algorithm::Ils: return "ILS";
    case Algorithm::Coarse: return "CG";
    case Algorithm::TwoStep: return "TS1";
    case Algorithm::TwoStepContinuous: return "TS2";
    case Algorithm::Exact: return "DP";
    case Algorithm::UpperBound: return "UB";
  }
  return "?";
}

std::optional<double> RunOutcome::value() const {
  if (bound) return bound->ub;
  if (result.schedule) return result.schedule->value;
  return std::nullopt;
}

std::string RunOutcome::status() const {
  if (bound) return "bound";
  return std::string(to_string(result.status));
}

std::string RunOutcome::to_json() const {
  return bound ? bound_to_json(*bound, result.wall_ms) : result_to_json(result);
}

RunOutcome run_algorithm(const Instance& inst, Algorithm alg, const AlgorithmOptions& options,
                         const PenaltyTable* table) {
  RunOutcome out;
  out.algorithm = alg;
  SolveLimits limits;
  limits.time_limit_s = options.time_limit_s;
  limits.memory_limit_bytes = options.memory_limit_bytes;
  limits.table = table;
  TwoStepParams two_step{options.grain, options.lambda, options.radius};

  const Stopwatch clock;
  try {
    switch (alg) {
      case Algorithm::FireSale:
      case Algorithm::Uniform:
        out.result.schedule = alg == Algorithm::FireSale ? fire_sale(inst) : uniform_sale(inst);
        out.result.status = SolveStatus::Heuristic;
        out.result.wall_ms = clock.elapsed_ms();
        break;
      case Algorithm::Ils: {
        IlsConfig config;
        config.max_iterations = options.ils_max_iterations;
        config.time_limit_s = options.time_limit_s;
        out.result = ils(inst, uniform_sale(inst), config);
        out.result.wall_ms = clock.elapsed_ms();
        break;
      }
      case Algorithm::Coarse:
        out.result = solve_coarse(inst, two_step.resolve_grain(inst), limits);
        break;
      case Algorithm::TwoStep:
        out.result = solve_two_step(inst, two_step, limits);
        break;
      case Algorithm::TwoStepContinuous:
        out.result = solve_two_step_continuous(inst, two_step, limits);
        break;
      case Algorithm::Exact:
        out.result = solve_exact(inst, limits);
        break;
      case Algorithm::UpperBound:
        out.bound = upper_bound(inst);
        out.result.wall_ms = clock.elapsed_ms();
        break;
    }
  } catch (const MemoryBudgetError&) {
    out.result = SolveResult{};
    out.result.status = SolveStatus::DncMemory;
    out.result.wall_ms = clock.elapsed_ms();
  } catch (const std::bad_alloc&) {
    out.result = SolveResult{};
    out.result.status = SolveStatus::DncMemory;
    out.result.wall_ms = clock.elapsed_ms();
  }
  out.result.algorithm = std::string(algorithm_name(alg));
  return out;
}

PriceMode PriceMode::parse(std::string_view text) {
  const std::string s = lower_case(text);
  if (s == "cst" || s == "constant") return {};
  if (s == "avg" || s == "average") return {Kind::Average, 0.0, 0.0};
  if (s.rfind("gbm:", 0) == 0) {
    const auto colon = s.find(':', 4);
    if (colon != std::string::npos) {
      try {
        std::size_t used_mu = 0;
        std::size_t used_sigma = 0;
        const std::string mu_text = s.substr(4, colon - 4);
        const std::string sigma_text = s.substr(colon + 1);
        const double mu = std::stod(mu_text, &used_mu);
        const double sigma = std::stod(sigma_text, &used_sigma);
        if (used_mu == mu_text.size() && used_sigma == sigma_text.size() && sigma >= 0.0)
          return {Kind::Gbm, mu, sigma};
      } catch (const std::exception&) {
      }
    }
  }
  throw DomainError("price mode must be cst, avg or gbm:<mu>:<sigma>, got '" +
                    std::string(text) + "'");
}

std::string PriceMode::label() const {
  switch (kind) {
    case Kind::Constant: return "cst";
    case Kind::Average: return "avg";
    case Kind::Gbm: return "gbm:" + number(mu) + ":" + number(sigma);
  }
  return "?";
}

GridPoint parse_grid_point(std::string_view text) {
  const auto colon = text.find(':');
  int a = -1;
  int b = -1;
  if (colon != std::string_view::npos) {
    const auto ra = std::from_chars(text.data(), text.data() + colon, a);
    const auto rb = std::from_chars(text.data() + colon + 1, text.data() + text.size(), b);
    if (ra.ec != std::errc{} || ra.ptr != text.data() + colon || rb.ec != std::errc{} ||
        rb.ptr != text.data() + text.size())
      a = -1;
  }
  if (a < 0 || b < 0 || a > 9 || b > 12)
    throw DomainError("grid point must be '<a>:<b>' for (T, N) = (10^a, 10^b), got '" +
                      std::string(text) + "'");
  return {static_cast<std::size_t>(std::llround(std::pow(10.0, a))),
          static_cast<Quantity>(std::llround(std::pow(10.0, b)))};
}

BenchConfig::BenchConfig()
    : grid{{10, 100}},
      prototypes{PenaltyPrototype::Arctan},
      modes{PriceMode{}},
      algorithms{Algorithm::FireSale, Algorithm::Uniform, Algorithm::Ils, Algorithm::TwoStep,
                 Algorithm::TwoStepContinuous, Algorithm::Exact, Algorithm::UpperBound} {
  options.grain = 100;
  options.time_limit_s = 600.0;
}

namespace {

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field '") + key + "': " + e.what());
  }
}

json parse_object(std::string_view text) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config JSON must be an object");
  return doc;
}

std::vector<GridPoint> parse_grid(const json& doc) {
  if (!doc.is_array()) throw ValidationError("'grid' must be an array");
  std::vector<GridPoint> grid;
  for (const auto& item : doc) {
    if (item.is_string()) {
      grid.push_back(parse_grid_point(item.get<std::string>()));
    } else if (item.is_object()) {
      grid.push_back({get_or<std::size_t>(item, "T", 0), get_or<Quantity>(item, "N", 0)});
      if (grid.back().steps == 0 || grid.back().block <= 0)
        throw ValidationError("grid entries need positive T and N");
    } else {
      throw ValidationError("grid entries are '<a>:<b>' strings or {\"T\", \"N\"} objects");
    }
  }
  return grid;
}

std::vector<PenaltyPrototype> parse_prototypes(const json& doc) {
  std::vector<PenaltyPrototype> out;
  const auto names = doc.is_string() ? std::vector<std::string>{doc.get<std::string>()}
                                     : doc.get<std::vector<std::string>>();
  for (const auto& name : names) {
    if (lower_case(name) == "all") {
      out.assign(std::begin(kAllPrototypes), std::end(kAllPrototypes));
    } else {
      out.push_back(parse_prototype(name));
    }
  }
  return out;
}

std::size_t memory_field(const json& doc, std::size_t fallback) {
  if (!doc.contains("memory_limit") || doc["memory_limit"].is_null()) return fallback;
  const json& v = doc["memory_limit"];
  if (v.is_string()) return parse_byte_size(v.get<std::string>());
  if (v.is_number() && v.get<double>() >= 0.0) return v.get<std::size_t>();
  throw ValidationError("'memory_limit' must be a byte count or a size string");
}

double time_field(const json& doc, double fallback) {
  const double t = get_or<double>(doc, "time_limit", fallback);
  // 0 or a negative value means no limit.
  return t > 0.0 ? t : std::numeric_limits<double>::infinity();
}

}  // namespace

BenchConfig parse_bench_config(std::string_view json_text) {
  const json doc = parse_object(json_text);
  BenchConfig c;
  try {
    if (doc.contains("grid")) c.grid = parse_grid(doc["grid"]);
    if (doc.contains("prototypes")) c.prototypes = parse_prototypes(doc["prototypes"]);
    if (doc.contains("modes")) {
      c.modes.clear();
      for (const auto& m : doc["modes"].get<std::vector<std::string>>())
        c.modes.push_back(PriceMode::parse(m));
    }
    if (doc.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : doc["algorithms"].get<std::vector<std::string>>())
        c.algorithms.push_back(parse_algorithm(a));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bench config: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  if (doc.contains("grain")) {
    // "auto" or null selects auto_grain.
    if (doc["grain"].is_string() && doc["grain"] == "auto") {
      c.options.grain.reset();
    } else if (doc["grain"].is_null()) {
      c.options.grain.reset();
    } else {
      c.options.grain = get_or<Quantity>(doc, "grain", 100);
    }
  }
  c.options.lambda = get_or<Quantity>(doc, "lambda", c.options.lambda);
  if (doc.contains("radius") && !doc["radius"].is_null())
    c.options.radius = get_or<Quantity>(doc, "radius", 1);
  c.options.time_limit_s = time_field(doc, c.options.time_limit_s);
  c.options.memory_limit_bytes = memory_field(doc, c.options.memory_limit_bytes);
  c.beta = get_or<double>(doc, "beta", c.beta);
  c.threshold = get_or<double>(doc, "H", c.threshold);
  if (doc.contains("eta") && !doc["eta"].is_null()) c.eta = get_or<double>(doc, "eta", 1.0);
  c.p0 = get_or<double>(doc, "p0", c.p0);
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  c.paths = get_or<std::size_t>(doc, "paths", c.paths);
  c.t_max = get_or<std::size_t>(doc, "T_max", c.t_max);
  c.workers = get_or<std::size_t>(doc, "workers", c.workers);
  if (c.paths == 0) throw ValidationError("'paths' must be positive");
  if (c.workers == 0) throw ValidationError("'workers' must be positive");
  if (c.options.grain && *c.options.grain < 1) throw ValidationError("'grain' must be at least 1");
  if (c.options.lambda < 1) throw ValidationError("'lambda' must be at least 1");
  if (c.options.radius && *c.options.radius < 1) throw ValidationError("'radius' must be at least 1");
  // Catch bad beta, H, eta, p0 or T > N before any cell runs: every cell of
  // a grid point shares these.
  for (const GridPoint& g : c.grid)
    for (PenaltyPrototype proto : c.prototypes) {
      InstanceParams params;
      params.prototype = proto;
      params.beta = c.beta;
      params.threshold = c.threshold;
      params.eta = c.eta;
      try {
        make_instance(g.block, std::vector<double>(g.steps, c.p0), params);
      } catch (const DomainError& e) {
        throw ValidationError(e.what());
      }
    }
  return c;
}

double gap_percent(Algorithm alg, double value, double reference) {
  if (alg == Algorithm::UpperBound) return 100.0 * (value - reference) / reference;
  return 100.0 * (reference - value) / reference;
}

std::string format_gap(std::optional<double> gap) {
  if (!gap) return "DNC";
  if (std::abs(*gap) <= 1e-9) return "0";
  if (*gap > 0.0 && *gap < 0.01) return "<ε";
  return fixed2(*gap);
}

std::string format_seconds(double seconds) {
  if (seconds < 0.01) return "<ε";
  return fixed2(seconds);
}

namespace {

struct BenchCell {
  GridPoint size;
  PenaltyPrototype prototype;
  PriceMode mode;
  int moment_index;  // avg only
};

std::vector<BenchRow> run_cell(const BenchConfig& config, const BenchCell& cell) {
  BenchRow base;
  base.steps = cell.size.steps;
  base.block = cell.size.block;
  base.prototype = cell.prototype;
  base.mode = cell.mode.label();
  base.moment_index = cell.moment_index;
  base.instance_id = "T" + std::to_string(cell.size.steps) + "-N" + std::to_string(cell.size.block) +
                     "-" + std::string(to_string(cell.prototype)) + "-" + base.mode;

  std::vector<double> prices;
  std::uint64_t seed = config.seed;
  switch (cell.mode.kind) {
    case PriceMode::Kind::Constant:
      prices.assign(cell.size.steps, config.p0);
      break;
    case PriceMode::Kind::Average: {
      const Moments m = kMomentGrid[cell.moment_index];
      base.mu = m.mu;
      base.sigma = m.sigma;
      base.instance_id += "-" + std::to_string(cell.moment_index);
      seed += 1000u * static_cast<std::uint64_t>(cell.moment_index);
      prices = simulated_prices(m.mu, m.sigma, config.p0, cell.size.steps, config.t_max,
                                config.paths, seed);
      break;
    }
    case PriceMode::Kind::Gbm:
      base.mu = cell.mode.mu;
      base.sigma = cell.mode.sigma;
      prices = simulated_prices(cell.mode.mu, cell.mode.sigma, config.p0, cell.size.steps,
                                config.t_max, config.paths, seed);
      break;
  }

  InstanceParams params;
  params.beta = config.beta;
  params.prototype = cell.prototype;
  params.threshold = config.threshold;
  params.eta = config.eta;

  std::vector<BenchRow> rows;
  std::optional<Instance> inst;
  std::string build_error;
  try {
    inst.emplace(make_instance(cell.size.block, std::move(prices), params));
  } catch (const Error& e) {
    build_error = e.what();
  }
  if (!inst) {
    for (Algorithm alg : config.algorithms) {
      BenchRow row = base;
      row.algorithm = alg;
      row.status = "error";
      rows.push_back(std::move(row));
    }
    return rows;
  }

  // Built ahead of the timed runs.
  const auto table = PenaltyTable::build(inst->penalty(), inst->block());
  const PenaltyTable* table_ptr = table ? &*table : nullptr;

  std::vector<RunOutcome> outcomes;
  for (Algorithm alg : config.algorithms) {
    try {
      outcomes.push_back(run_algorithm(*inst, alg, config.options, table_ptr));
    } catch (const Error&) {
      RunOutcome failed;
      failed.algorithm = alg;
      failed.result.algorithm = std::string(algorithm_name(alg));
      failed.result.status = SolveStatus::Heuristic;
      outcomes.push_back(std::move(failed));
    }
  }

  // Reference: the exact optimum when it completed, else the best lower bound.
  std::optional<double> reference;
  for (const auto& o : outcomes)
    if (o.algorithm == Algorithm::Exact && o.value()) reference = o.value();
  if (!reference) {
    for (const auto& o : outcomes) {
      if (o.algorithm == Algorithm::UpperBound || !o.value()) continue;
      if (!reference || *o.value() > *reference) reference = o.value();
    }
  }

  for (const auto& o : outcomes) {
    BenchRow row = base;
    row.algorithm = o.algorithm;
    row.value = o.value();
    row.status = row.value || is_dnc(o.result.status) ? o.status() : "error";
    row.reference = reference;
    if (row.value && reference && *reference != 0.0)
      row.gap_pct = gap_percent(o.algorithm, *row.value, *reference);
    row.wall_ms = o.result.wall_ms;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  BenchReport report;
  report.config = config;
  if (config.algorithms.empty()) return report;

  std::vector<BenchCell> cells;
  for (const auto& size : config.grid)
    for (PenaltyPrototype proto : config.prototypes)
      for (const auto& mode : config.modes) {
        if (mode.kind == PriceMode::Kind::Average) {
          for (int i = 0; i < static_cast<int>(std::size(kMomentGrid)); ++i)
            cells.push_back({size, proto, mode, i});
        } else {
          cells.push_back({size, proto, mode, -1});
        }
      }

  std::vector<std::vector<BenchRow>> results(cells.size());
  const std::size_t workers = std::min(config.workers, cells.size());
  report.timing_reliable = workers <= 1;
  parallel_for(cells.size(), workers,
               [&](std::size_t i) { results[i] = run_cell(config, cells[i]); });
  for (auto& r : results)
    for (auto& row : r) report.rows.push_back(std::move(row));
  return report;
}

std::string BenchReport::csv() const {
  std::string out = csv_line({"instance_id", "T", "N", "prototype", "prices", "mu", "sigma",
                              "algorithm", "status", "value", "reference", "gap_pct", "wall_ms",
                              "timing"});
  const std::string timing = timing_reliable ? "reliable" : "timing-unreliable";
  for (const auto& r : rows) {
    out += csv_line({r.instance_id, std::to_string(r.steps), std::to_string(r.block),
                     std::string(to_string(r.prototype)), r.mode, number(r.mu), number(r.sigma),
                     std::string(algorithm_name(r.algorithm)), r.status, optional_number(r.value),
                     optional_number(r.reference), optional_number(r.gap_pct), number(r.wall_ms),
                     timing});
  }
  return out;
}

namespace {

// Mean over the rows of one (size, prototype, mode) group; nullopt when any
// member has no value.
struct Aggregate {
  std::optional<double> gap;
  std::optional<double> seconds;
};

Aggregate aggregate(const std::vector<const BenchRow*>& group) {
  Aggregate a;
  if (group.empty()) return a;
  double gap = 0.0;
  double ms = 0.0;
  bool all_gaps = true;
  bool all_done = true;
  for (const BenchRow* r : group) {
    if (r->gap_pct) gap += *r->gap_pct; else all_gaps = false;
    if (r->value) ms += r->wall_ms; else all_done = false;
  }
  const double n = static_cast<double>(group.size());
  if (all_gaps) a.gap = gap / n;
  if (all_done) a.seconds = ms / n / 1000.0;
  return a;
}

}  // namespace

std::string BenchReport::markdown() const {
  using Key = std::tuple<std::size_t, Quantity, PenaltyPrototype, std::string, Algorithm>;
  std::map<Key, std::vector<const BenchRow*>> groups;
  for (const auto& r : rows)
    groups[{r.steps, r.block, r.prototype, r.mode, r.algorithm}].push_back(&r);
  auto cell = [&](const GridPoint& g, PenaltyPrototype p, const std::string& mode, Algorithm a) {
    const auto it = groups.find({g.steps, g.block, p, mode, a});
    return it == groups.end() ? Aggregate{} : aggregate(it->second);
  };

  std::ostringstream md;
  if (!timing_reliable) md << "_Cells ran concurrently: wall times are timing-unreliable._\n\n";

  for (const char* metric : {"Quality", "CPU"}) {
    const bool quality = std::string_view(metric) == "Quality";
    for (const auto& mode : config.modes) {
      const std::string label = mode.label();
      for (PenaltyPrototype proto : config.prototypes) {
        md << "### " << metric << (quality ? " (gap %)" : " (s)") << ", " << label << ", "
           << to_string(proto) << "\n\n";
        std::vector<std::string> head{"T", "N"};
        for (Algorithm a : config.algorithms) head.emplace_back(algorithm_label(a));
        md << md_row(head) << md_rule(head.size());
        for (const auto& g : config.grid) {
          std::vector<std::string> line{power_of_ten(static_cast<double>(g.steps)),
                                        power_of_ten(static_cast<double>(g.block))};
          for (Algorithm a : config.algorithms) {
            const Aggregate agg = cell(g, proto, label, a);
            line.push_back(quality ? format_gap(agg.gap)
                                   : (agg.seconds ? format_seconds(*agg.seconds) : "DNC"));
          }
          md << md_row(line);
        }
        md << "\n";
      }
    }
  }

  // Per-algorithm CPU layout with one column per (prototype, price mode).
  if (config.prototypes.size() * config.modes.size() > 1) {
    for (Algorithm a : config.algorithms) {
      md << "### CPU (s), " << algorithm_label(a) << "\n\n";
      std::vector<std::string> head{"T", "N"};
      for (PenaltyPrototype proto : config.prototypes)
        for (const auto& mode : config.modes)
          head.push_back(std::string(to_string(proto)) + " " + mode.label());
      md << md_row(head) << md_rule(head.size());
      for (const auto& g : config.grid) {
        std::vector<std::string> line{power_of_ten(static_cast<double>(g.steps)),
                                      power_of_ten(static_cast<double>(g.block))};
        for (PenaltyPrototype proto : config.prototypes)
          for (const auto& mode : config.modes) {
            const Aggregate agg = cell(g, proto, mode.label(), a);
            line.push_back(agg.seconds ? format_seconds(*agg.seconds) : "DNC");
          }
        md << md_row(line);
      }
      md << "\n";
    }
  }
  return md.str();
}

std::vector<GridPoint> CalibrationConfig::default_grid(bool large) {
  std::vector<GridPoint> grid{{10, 100}, {10, 1000}, {10, 10'000}, {100, 1000}, {100, 10'000}};
  if (large) {
    grid.insert(grid.begin() + 3, {{10, 100'000}, {10, 1'000'000}});
    grid.push_back({100, 100'000});
    grid.push_back({1000, 100'000});
  }
  return grid;
}

CalibrationConfig::CalibrationConfig()
    : grid(default_grid(false)), prototypes(std::begin(kAllPrototypes), std::end(kAllPrototypes)) {}

CalibrationConfig parse_calibration_config(std::string_view json_text) {
  const json doc = parse_object(json_text);
  CalibrationConfig c;
  try {
    if (doc.contains("H")) c.thresholds = doc["H"].get<std::vector<double>>();
    c.include_unit_eta = get_or<bool>(doc, "unit_eta", c.include_unit_eta);
    c.grid = CalibrationConfig::default_grid(get_or<bool>(doc, "large", false));
    if (doc.contains("grid")) c.grid = parse_grid(doc["grid"]);
    if (doc.contains("prototypes")) c.prototypes = parse_prototypes(doc["prototypes"]);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("calibration config: ") + e.what());
  } catch (const DomainError& e) {
    throw ValidationError(e.what());
  }
  for (double h : c.thresholds)
    if (!(h > 0.0 && h < 1.0)) throw ValidationError("thresholds H must lie in (0, 1)");
  c.beta = get_or<double>(doc, "beta", c.beta);
  c.p0 = get_or<double>(doc, "p0", c.p0);
  c.time_limit_s = time_field(doc, c.time_limit_s);
  c.memory_limit_bytes = memory_field(doc, c.memory_limit_bytes);
  c.workers = get_or<std::size_t>(doc, "workers", c.workers);
  if (c.workers == 0) throw ValidationError("'workers' must be positive");
  if (!(c.beta > 0.0 && c.beta < 1.0)) throw ValidationError("beta must lie in (0, 1)");
  if (!(c.p0 > 0.0)) throw ValidationError("'p0' must be positive");
  return c;
}

CalibrationReport run_calibration(const CalibrationConfig& config) {
  std::vector<std::optional<double>> levels(config.thresholds.begin(), config.thresholds.end());
  if (config.include_unit_eta) levels.push_back(std::nullopt);

  CalibrationReport report;
  report.config = config;
  for (const auto& h : levels)
    for (const auto& g : config.grid)
      for (PenaltyPrototype proto : config.prototypes) {
        CalibrationCell cell;
        cell.threshold = h;
        cell.size = g;
        cell.prototype = proto;
        report.cells.push_back(cell);
      }

  parallel_for(report.cells.size(), config.workers, [&](std::size_t i) {
    CalibrationCell& cell = report.cells[i];
    InstanceParams params;
    params.beta = config.beta;
    params.prototype = cell.prototype;
    if (cell.threshold) {
      params.threshold = *cell.threshold;
    } else {
      params.eta = 1.0;
    }
    std::optional<Instance> built;
    try {
      built.emplace(make_instance(cell.size.block,
                                  std::vector<double>(cell.size.steps, config.p0), params));
    } catch (const Error&) {
      cell.exact_status = "error";
      return;
    }
    const Instance& inst = *built;
    cell.eta = inst.penalty().eta();
    const auto table = PenaltyTable::build(inst.penalty(), inst.block());

    AlgorithmOptions options;
    options.time_limit_s = config.time_limit_s;
    options.memory_limit_bytes = config.memory_limit_bytes;
    const RunOutcome exact = run_algorithm(inst, Algorithm::Exact, options, table ? &*table : nullptr);
    cell.exact_status = exact.status();
    cell.exact_ms = exact.result.wall_ms;
    const auto optimum = exact.value();
    if (!optimum) return;
    cell.fire_sale_gap = gap_percent(Algorithm::FireSale, fire_sale(inst).value, *optimum);
    cell.uniform_gap = gap_percent(Algorithm::Uniform, uniform_sale(inst).value, *optimum);
  });
  return report;
}

std::string CalibrationReport::csv() const {
  std::string out = csv_line({"eta_label", "eta", "T", "N", "prototype", "fs_gap_pct",
                              "us_gap_pct", "exact_status", "exact_ms"});
  for (const auto& c : cells) {
    out += csv_line({c.threshold ? "H=" + number(*c.threshold) : "eta=1", number(c.eta),
                     std::to_string(c.size.steps), std::to_string(c.size.block),
                     std::string(to_string(c.prototype)), optional_number(c.fire_sale_gap),
                     optional_number(c.uniform_gap), c.exact_status, number(c.exact_ms)});
  }
  return out;
}

std::string CalibrationReport::markdown() const {
  std::vector<std::optional<double>> levels(config.thresholds.begin(), config.thresholds.end());
  if (config.include_unit_eta) levels.push_back(std::nullopt);

  std::ostringstream md;
  for (const auto& h : levels) {
    md << "### " << (h ? "η_" + number(*h) : std::string("η = 1")) << "\n\n";
    std::vector<std::string> head{"T", "N"};
    for (PenaltyPrototype proto : config.prototypes) {
      head.push_back(std::string(to_string(proto)) + " FS");
      head.push_back(std::string(to_string(proto)) + " US");
    }
    md << md_row(head) << md_rule(head.size());
    for (const auto& g : config.grid) {
      std::vector<std::string> line{power_of_ten(static_cast<double>(g.steps)),
                                    power_of_ten(static_cast<double>(g.block))};
      for (PenaltyPrototype proto : config.prototypes) {
        const auto it = std::find_if(cells.begin(), cells.end(), [&](const CalibrationCell& c) {
          return c.threshold == h && c.size.steps == g.steps && c.size.block == g.block &&
                 c.prototype == proto;
        });
        const bool done = it != cells.end() && it->fire_sale_gap;
        line.push_back(done ? format_gap(it->fire_sale_gap) : "DNC");
        line.push_back(done ? format_gap(it->uniform_gap) : "DNC");
      }
      md << md_row(line);
    }
    md << "\n";
  }
  return md.str();
}

}  // namespace lbs
