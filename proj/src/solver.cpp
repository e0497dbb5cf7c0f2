#include "lbs/solver.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "lbs/errors.hpp"

namespace lbs {

std::size_t parse_byte_size(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (!s.empty() && (s.back() == 'B' || s.back() == 'b')) s.pop_back();
  double scale = 1.0;
  if (!s.empty()) {
    switch (std::toupper(static_cast<unsigned char>(s.back()))) {
      case 'K': scale = 0x1.0p10; break;
      case 'M': scale = 0x1.0p20; break;
      case 'G': scale = 0x1.0p30; break;
      case 'T': scale = 0x1.0p40; break;
      default: break;
    }
    if (scale != 1.0) s.pop_back();
  }
  double amount = 0.0;
  try {
    std::size_t used = 0;
    amount = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw DomainError("cannot parse byte size '" + std::string(text) + "'");
  }
  if (!(amount >= 0.0) || !std::isfinite(amount * scale))
    throw DomainError("byte size must be non-negative: '" + std::string(text) + "'");
  return static_cast<std::size_t>(amount * scale);
}

std::size_t default_memory_budget() {
  if (const char* env = std::getenv(kMemoryBudgetEnv); env != nullptr && *env != '\0')
    return parse_byte_size(env);
  // 24 GiB, but never more than the machine has: an over-large budget only
  // turns a clean DNC into an OOM kill.
  std::size_t budget = std::size_t{24} << 30;
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page_size = sysconf(_SC_PAGE_SIZE);
  if (pages > 0 && page_size > 0)
    budget = std::min(budget, static_cast<std::size_t>(pages) * static_cast<std::size_t>(page_size));
  return budget;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Heuristic: return "heuristic";
    case SolveStatus::LocalOptimum: return "local_optimum";
    case SolveStatus::IterationCap: return "iteration_cap";
    case SolveStatus::TimeCap: return "time_cap";
    case SolveStatus::DncTime:
    case SolveStatus::DncMemory: return "dnc";
  }
  return "unknown";
}

Deadline::Deadline(double seconds)
    : bounded_(std::isfinite(seconds) && seconds > 0.0) {
  if (bounded_)
    end_ = std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
               std::chrono::duration<double>(seconds));
}

bool Deadline::expired() const {
  return bounded_ && std::chrono::steady_clock::now() >= end_;
}

}  // namespace lbs
