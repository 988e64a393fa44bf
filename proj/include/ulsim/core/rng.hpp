#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ulsim {

/// Deterministic random stream. Every consumer owns its own stream keyed by
/// (seed, label) so adding or reordering consumers never shifts another's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t engine_seed) : engine_(engine_seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  double normal(double mean, double stddev);
  double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
  std::int64_t poisson(double mean);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Stream for (seed, label); identical pairs replay identical draws.
Rng seeded_rng(std::uint64_t seed, std::string_view stream_label);

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label);

}  // namespace ulsim
