#pragma once

#include <span>
#include <vector>

#include "ulsim/core/geometry.hpp"
#include "ulsim/localizer/bearing.hpp"

namespace ulsim::loc {

struct LocationEstimate {
  Position position;
  double residual_m = 0.0;
  std::vector<BearingMeasurement> bearings;
};

/// Midpoint of the closest points of the two bearing rays; residual is half
/// their separation. Throws IllConditionedError when the rays cross at less
/// than `min_crossing_deg`.
LocationEstimate multiangulate(const BearingMeasurement& b1, const BearingMeasurement& b2,
                               double min_crossing_deg = 5.0);

/// Pairwise solutions averaged over every well-conditioned pair.
LocationEstimate multiangulate(std::span<const BearingMeasurement> bearings, double min_crossing_deg = 5.0);

double localization_error(const LocationEstimate& est, const Position& truth);

}  // namespace ulsim::loc
