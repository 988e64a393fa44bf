#include "ulsim/channel/antenna.hpp"

#include <algorithm>
#include <cmath>

#include "ulsim/core/errors.hpp"
#include "ulsim/core/geometry.hpp"

namespace ulsim::channel {

void AntennaPattern::validate() const {
  if (!(beamwidth_3db_deg > 0.0 && beamwidth_3db_deg <= 360.0)) {
    throw ConfigError("antenna beamwidth must be in (0, 360]");
  }
  if (!(floor_db <= g0_db)) {
    throw ConfigError("antenna floor must not exceed boresight gain");
  }
}

double antenna_gain(const AntennaPattern& pattern, double offset_deg) {
  const double theta = wrap_180(offset_deg);
  const double ratio = theta / pattern.beamwidth_3db_deg;
  return std::max(pattern.g0_db - 12.0 * ratio * ratio, pattern.floor_db);
}

}  // namespace ulsim::channel
