#pragma once

#include <span>

namespace ulsim::loc {

/// Percentile with linear interpolation between closest ranks, q in [0, 100].
/// +inf entries sort last, so failures push upper percentiles up.
double percentile(std::span<const double> values, double q);
double median(std::span<const double> values);

}  // namespace ulsim::loc
