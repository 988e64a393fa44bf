#pragma once

#include <cstdint>

#include "ulsim/core/rng.hpp"

namespace ulsim::ue {

/// Background application load. Uplink packets land in the UE buffer;
/// downlink rates generate bearer deliveries through the eNB.
struct TrafficProfile {
  double uplink_packets_per_s = 0.0;
  std::uint32_t uplink_packet_bytes = 300;
  double drb1_per_s = 0.0;
  double drb2_per_s = 0.0;

  static TrafficProfile idle() { return {}; }
  bool is_idle() const { return uplink_packets_per_s == 0.0 && drb1_per_s == 0.0 && drb2_per_s == 0.0; }
  void validate() const;
};

struct TrafficDraw {
  std::uint32_t uplink_bytes = 0;
  int drb1 = 0;
  int drb2 = 0;
};

/// Arrivals within one 1 ms subframe (independent Poisson counts).
TrafficDraw app_traffic(const TrafficProfile& profile, Rng& rng);

}  // namespace ulsim::ue
