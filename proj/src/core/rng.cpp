#include "ulsim/core/rng.hpp"

#include <cmath>


namespace ulsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

double Rng::normal(double mean, double stddev) {
  if (stddev <= 0.0) {
    return mean;
  }
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

std::int64_t Rng::poisson(double mean) {
  if (mean <= 0.0) {
    return 0;
  }
  return std::poisson_distribution<std::int64_t>(mean)(engine_);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
  return splitmix64(splitmix64(seed) ^ fnv1a(label));
}

Rng seeded_rng(std::uint64_t seed, std::string_view stream_label) { return Rng(mix_seed(seed, stream_label)); }

}  // namespace ulsim
