#include "lbs/prices.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "lbs/errors.hpp"

namespace lbs {

NormalSource::NormalSource(std::uint64_t seed) : engine_(seed) {}

double NormalSource::uniform_open() {
  // (k + 0.5) / 2^53 never hits 0 or 1, so log() below stays finite.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double NormalSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

namespace {

void validate(const GbmSpec& spec) {
  if (!(spec.p0 > 0.0) || !std::isfinite(spec.p0)) throw DomainError("GBM p0 must be positive");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
    throw DomainError("GBM sigma must be non-negative");
  if (!std::isfinite(spec.mu)) throw DomainError("GBM mu must be finite");
  if (spec.steps == 0) throw DomainError("GBM needs at least one step");
  if (spec.dt < 0.0 || !std::isfinite(spec.dt)) throw DomainError("GBM dt must be positive");
}

}  // namespace

std::vector<double> simulate_gbm(const GbmSpec& spec) {
  validate(spec);
  const double dt = spec.step_length();
  const double drift = (spec.mu - 0.5 * spec.sigma * spec.sigma) * dt;
  const double diffusion = spec.sigma * std::sqrt(dt);

  NormalSource normals(spec.seed);
  std::vector<double> path(spec.steps);
  double s = spec.p0;
  for (auto& entry : path) {
    s *= std::exp(drift + diffusion * normals.next());
    entry = s;
  }
  return path;
}

PriceBatch build_batch(double mu, double sigma, double p0, std::size_t steps, double dt,
                       std::size_t paths, std::uint64_t seed) {
  if (paths == 0) throw DomainError("a price batch needs at least one path");
  PriceBatch batch;
  batch.paths.reserve(paths);
  for (std::size_t r = 0; r < paths; ++r) {
    GbmSpec spec{p0, mu, sigma, steps, dt, seed + r};
    batch.paths.push_back(simulate_gbm(spec));
  }
  batch.averaged.assign(steps, 0.0);
  for (const auto& path : batch.paths)
    for (std::size_t t = 0; t < steps; ++t) batch.averaged[t] += path[t];
  for (auto& v : batch.averaged) v /= static_cast<double>(paths);
  return batch;
}

std::vector<double> subsample(std::span<const double> averaged, std::size_t steps) {
  if (steps == 0 || averaged.size() % steps != 0)
    throw DomainError("T = " + std::to_string(steps) + " does not divide the path length " +
                      std::to_string(averaged.size()));
  const std::size_t stride = averaged.size() / steps;
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i) out[i] = averaged[(i + 1) * stride - 1];
  return out;
}

void write_price_csv(std::ostream& out, std::span<const double> prices, const char* header) {
  out << header << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (double p : prices) out << p << '\n';
  out.precision(old_precision);
}

std::vector<double> read_price_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("price CSV is empty");
  std::vector<double> prices;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Only the first column is read, quoted or not.
    std::string cell = line.substr(0, line.find(','));
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"')
      cell = cell.substr(1, cell.size() - 2);
    try {
      std::size_t used = 0;
      prices.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw IoError("price CSV line " + std::to_string(line_no) + ": not a number: " + cell);
    }
  }
  return prices;
}

}  // namespace lbs
