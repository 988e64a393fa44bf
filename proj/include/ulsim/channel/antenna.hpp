#pragma once

namespace ulsim::channel {

/// Directional antenna with a parabolic main lobe and a flat back-lobe floor.
struct AntennaPattern {
  double g0_db = 5.0;
  double beamwidth_3db_deg = 60.0;
  double floor_db = -25.0;

  void validate() const;
};

/// g0 - 12 (offset / beamwidth)^2, never below floor. Offset wraps to [-180, 180).
double antenna_gain(const AntennaPattern& pattern, double offset_deg);

}  // namespace ulsim::channel
