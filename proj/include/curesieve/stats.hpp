#pragma once

#include <cstdint>
#include <random>

namespace curesieve {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile function (inverse CDF), p in (0, 1).
double norm_ppf(double p);

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for an independent substream; pure function of (seed, stream), so
/// parallel consumers get identical draws regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Random draws built from stateless transforms of raw 53-bit uniforms.
// Unlike std::normal_distribution there is no hidden cache, so the stream
// consumed per call is fixed and results are reproducible by construction.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() { return norm_ppf(uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace curesieve
