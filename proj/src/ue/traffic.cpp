#include "ulsim/ue/traffic.hpp"

#include "ulsim/core/errors.hpp"

namespace ulsim::ue {

void TrafficProfile::validate() const {
  if (uplink_packets_per_s < 0.0 || drb1_per_s < 0.0 || drb2_per_s < 0.0) {
    throw ConfigError("traffic rates must be >= 0");
  }
}

TrafficDraw app_traffic(const TrafficProfile& profile, Rng& rng) {
  TrafficDraw d;
  if (profile.uplink_packets_per_s > 0.0) {
    d.uplink_bytes = static_cast<std::uint32_t>(rng.poisson(profile.uplink_packets_per_s / 1000.0)) *
                     profile.uplink_packet_bytes;
  }
  if (profile.drb1_per_s > 0.0) {
    d.drb1 = static_cast<int>(rng.poisson(profile.drb1_per_s / 1000.0));
  }
  if (profile.drb2_per_s > 0.0) {
    d.drb2 = static_cast<int>(rng.poisson(profile.drb2_per_s / 1000.0));
  }
  return d;
}

}  // namespace ulsim::ue
