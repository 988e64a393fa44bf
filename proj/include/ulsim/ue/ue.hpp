#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ulsim/channel/transmission.hpp"
#include "ulsim/core/geometry.hpp"
#include "ulsim/core/sim_time.hpp"
#include "ulsim/phy/bsr.hpp"
#include "ulsim/phy/dci0.hpp"
#include "ulsim/phy/scheduling_request.hpp"
#include "ulsim/ue/power_control.hpp"

namespace ulsim::ue {

struct UeTiming {
  int k_grant = 4;
  std::uint32_t rb_bytes = 16;
};

struct ScheduledPusch {
  SimTime at;
  std::uint32_t grant_bytes = 0;
  int rb_count = 1;
};

struct UeState {
  std::uint64_t identity = 0;
  std::optional<std::uint16_t> rnti;
  std::optional<phy::SchedulingRequestConfig> sr_config;
  std::uint32_t buffer_bytes = 0;
  PowerControlState power;
  Position position;
  /// Downlink path loss estimate used by open-loop power control.
  double path_loss_db = 0.0;
  std::vector<ScheduledPusch> scheduled;
  bool connection_requested = false;
  std::int64_t grants_received = 0;
  std::int64_t pusch_sent = 0;
};

/// Applies the TPC (positive steps are dropped at P_CMAX) and queues a PUSCH
/// k_grant subframes later. DCIs for other RNTIs are ignored. The UE honours
/// every grant it decodes.
std::optional<ScheduledPusch> on_dci0(UeState& ue, const phy::Dci0& d, SimTime now, const UeTiming& timing = {});

/// Takes the grant due at `at`, if any.
std::optional<ScheduledPusch> take_due_pusch(UeState& ue, SimTime at);

/// Fills a granted PUSCH: data up to the grant (minus the BSR CE) and a
/// BSR of what remains; with an empty buffer, padding and BSR 0.
phy::MacPdu build_pusch(UeState& ue, const ScheduledPusch& grant);

std::optional<phy::SchedulingRequest> maybe_send_sr(const UeState& ue, SimTime at);

/// Adopts the RNTI and SR configuration if the setup names this UE; a new
/// connection starts with f = 0.
bool on_setup(UeState& ue, const channel::RrcSetupMessage& setup);
bool on_release(UeState& ue, const channel::RrcRelease& release);

double pusch_tx_power(const UeState& ue, int rb_count);

}  // namespace ulsim::ue
