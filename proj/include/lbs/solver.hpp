#pragma once

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "lbs/model.hpp"

namespace lbs {

/// Environment variable holding the default memory budget, e.g. "24G" or a
/// plain byte count.
inline constexpr const char* kMemoryBudgetEnv = "LBS_MEMORY_LIMIT";

/// kMemoryBudgetEnv if set, else 24 GiB capped at physical memory.
std::size_t default_memory_budget();

/// Parses "123", "512M", "24G", "1.5T" (binary multiples). Throws DomainError.
std::size_t parse_byte_size(std::string_view text);

struct SolveLimits {
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::size_t memory_limit_bytes = default_memory_budget();
  /// Optional g(0..N) lookup. Must have been built from the instance's penalty.
  const PenaltyTable* table = nullptr;
};

enum class SolveStatus {
  Optimal,       // proven optimum (exact DP)
  Heuristic,     // feasible schedule, no optimality claim
  LocalOptimum,  // local search reached a fixed point
  IterationCap,  // local search stopped on its iteration cap, best so far returned
  TimeCap,       // local search stopped on its time cap, best so far returned
  DncTime,       // no schedule: time limit hit before completion
  DncMemory,     // no schedule: memory budget would be exceeded
};

/// JSON/CSV spelling: optimal, heuristic, local_optimum, iteration_cap,
/// time_cap, dnc.
std::string_view to_string(SolveStatus status);

inline bool is_dnc(SolveStatus status) {
  return status == SolveStatus::DncTime || status == SolveStatus::DncMemory;
}

struct SolveResult {
  std::string algorithm;
  SolveStatus status = SolveStatus::Heuristic;
  std::optional<Schedule> schedule;
  double wall_ms = 0.0;
  /// First-stage value of two-step methods.
  std::optional<double> stage1_value;
};

class Deadline {
 public:
  explicit Deadline(double seconds);
  bool expired() const;

 private:
  std::chrono::steady_clock::time_point end_;
  bool bounded_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace lbs
