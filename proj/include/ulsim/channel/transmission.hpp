#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ulsim/core/geometry.hpp"
#include "ulsim/core/sim_time.hpp"
#include "ulsim/phy/bsr.hpp"
#include "ulsim/phy/dci0.hpp"
#include "ulsim/phy/scheduling_request.hpp"

namespace ulsim::channel {

enum class Bearer { Srb, Drb1, Drb2 };
const char* to_string(Bearer b);

/// Unencrypted RRC Connection Setup carrying the dedicated SR configuration.
struct RrcSetupMessage {
  std::uint16_t rnti = 0;
  /// Contention-resolution identity echoed back to the requesting UE.
  std::uint64_t ue_identity = 0;
  phy::SchedulingRequestConfig sr_config;
};

/// Downlink delivery on a radio bearer, visible to a sniffer as (rnti, bearer).
struct BearerEvent {
  std::uint16_t rnti = 0;
  Bearer bearer = Bearer::Srb;
};

struct RrcRelease {
  std::uint16_t rnti = 0;
};

/// Random-access connection request from an idle UE.
struct ConnectionRequest {
  std::uint64_t ue_identity = 0;
};

/// Control region plus the broadcasts the eNB sent in one downlink subframe.
struct DownlinkSubframe {
  std::vector<phy::Dci0> dcis;
  std::vector<RrcSetupMessage> setups;
  std::vector<BearerEvent> bearer_events;
  std::vector<RrcRelease> releases;
};

enum class Link { Downlink, Uplink };
/// Random access is carried on the PUCCH tag; PRACH is not modelled separately.
enum class PhyChannel { Pucch, Pusch, Pdcch };

using Payload = std::variant<DownlinkSubframe, phy::MacPdu, phy::SchedulingRequest, ConnectionRequest>;

inline constexpr double kUeMaxTxPowerDbm = 23.0;

struct Transmission {
  std::string source_id;
  Position source_position;
  double tx_power_dbm = 0.0;
  Payload payload;
  Link link = Link::Uplink;
  PhyChannel channel = PhyChannel::Pusch;
  SimTime subframe;
  /// Ground truth for bookkeeping only; receivers decide by power.
  bool injected = false;
  /// Source of the original signal when this is a repeater relay, else empty.
  std::string relayed_from;

  bool is_relay() const { return !relayed_from.empty(); }
  /// Entity whose signal this is (the UE for a relayed copy).
  const std::string& origin() const { return is_relay() ? relayed_from : source_id; }
};

/// Link/channel pairing: PDCCH is downlink, PUCCH and PUSCH are uplink.
bool channel_matches_link(PhyChannel ch, Link link);

}  // namespace ulsim::channel
