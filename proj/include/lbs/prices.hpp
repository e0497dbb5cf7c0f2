#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace lbs {

/// Geometric Brownian motion, sampled on a regular grid.
///
/// The path holds S_1 .. S_steps (the starting price p0 = S_0 is not part of
/// it), so the last entry sits at horizon steps * dt.
struct GbmSpec {
  double p0 = 100.0;
  double mu = 0.0;
  double sigma = 0.0;
  std::size_t steps = 1000;
  /// Defaults to 1 / steps when left at 0, so one path spans one unit of time.
  double dt = 0.0;
  std::uint64_t seed = 0;

  double step_length() const { return dt > 0.0 ? dt : 1.0 / static_cast<double>(steps); }
};

/// Standard normal variates for price simulation.
///
/// mt19937_64 (bit-exact across standard libraries) feeds a Box-Muller
/// transform written out here, since std::normal_distribution is
/// implementation defined. Uniforms are the top 53 bits of each draw.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed);
  double next();

 private:
  double uniform_open();

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// S_{k+1} = S_k exp[(mu - sigma^2/2) dt + sigma sqrt(dt) Z_k]
std::vector<double> simulate_gbm(const GbmSpec& spec);

struct PriceBatch {
  /// paths[r] is the r-th simulated path, all of equal length.
  std::vector<std::vector<double>> paths;
  /// Pointwise arithmetic mean over paths.
  std::vector<double> averaged;
};

/// R paths from sub-seeds seed, seed + 1, ..., seed + R - 1, then averaged.
PriceBatch build_batch(double mu, double sigma, double p0, std::size_t steps, double dt,
                       std::size_t paths, std::uint64_t seed);

/// Entries at 1-based positions stride, 2 stride, ..., T stride, with
/// stride = size / T. Throws DomainError unless T divides the length.
std::vector<double> subsample(std::span<const double> averaged, std::size_t steps);

/// The moment grid mu x sigma used for the averaged experiments.
struct Moments {
  double mu;
  double sigma;
};
inline constexpr Moments kMomentGrid[] = {
    {-0.05, 0.10}, {-0.05, 0.25}, {-0.05, 0.70}, {0.0, 0.10},  {0.0, 0.25},
    {0.0, 0.70},   {0.05, 0.10},  {0.05, 0.25},  {0.05, 0.70},
};

/// Single-column CSV with a one-line header.
void write_price_csv(std::ostream& out, std::span<const double> prices,
                     const char* header = "price");
std::vector<double> read_price_csv(std::istream& in);

}  // namespace lbs
