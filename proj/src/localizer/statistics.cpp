#include "ulsim/localizer/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ulsim/core/errors.hpp"

namespace ulsim::loc {

double percentile(std::span<const double> values, double q) {
  if (values.empty()) {
    throw ConfigError("percentile of an empty sample");
  }
  if (!(q >= 0.0 && q <= 100.0)) {
    throw ConfigError("percentile q must be in [0, 100]");
  }
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double rank = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  if (frac == 0.0 || v[lo] == v[hi]) {
    return v[lo];
  }
  return v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return percentile(values, 50.0); }

}  // namespace ulsim::loc
