#pragma once

#include <optional>
#include <vector>

#include "ulsim/core/geometry.hpp"
#include "ulsim/localizer/sweep.hpp"

namespace ulsim::loc {

/// Ordered: undetectable < ambiguous < ok.
enum class BearingQuality { Undetectable = 0, Ambiguous = 1, Ok = 2 };
const char* to_string(BearingQuality q);

struct BearingMeasurement {
  Position sniffer;
  std::optional<double> bearing_deg;
  double peak_dbm = 0.0;
  double snr_db = 0.0;
  BearingQuality quality = BearingQuality::Undetectable;
};

struct BearingOptions {
  /// An angle counts as detected when its mean is this far above the noise floor.
  double detection_margin_db = 6.0;
  double ambiguity_db = 3.0;
  double beamwidth_deg = 60.0;
};

/// Peak angle refined by a parabola through the peak and its neighbours;
/// snr is peak minus the profile median. Throws EmptyProfileError.
BearingMeasurement estimate_bearing(const SweepProfile& p, const BearingOptions& opt = {});

/// Indices of local maxima, strongest first (NaN angles never qualify).
std::vector<std::size_t> local_maxima(const SweepProfile& p);

}  // namespace ulsim::loc
