#include "ulsim/ue/ue.hpp"

#include <algorithm>

namespace ulsim::ue {

std::optional<ScheduledPusch> on_dci0(UeState& ue, const phy::Dci0& d, SimTime now, const UeTiming& timing) {
  if (!ue.rnti || d.rnti != *ue.rnti) {
    return std::nullopt;
  }
  // Positive steps are not accumulated once the UE already transmits at P_CMAX.
  if (phy::tpc_accumulated_delta_db(d.tpc_command) <= 0 || pusch_tx_power(ue, 1) < ue.power.p_cmax_dbm) {
    ue.power.apply_tpc(d.tpc_command);
  }
  ScheduledPusch p;
  p.at = now.plus_ms(timing.k_grant);
  p.rb_count = d.rb.length;
  p.grant_bytes = static_cast<std::uint32_t>(d.rb.length) * timing.rb_bytes;
  auto pos = std::upper_bound(ue.scheduled.begin(), ue.scheduled.end(), p,
                              [](const ScheduledPusch& a, const ScheduledPusch& b) { return a.at < b.at; });
  ue.scheduled.insert(pos, p);
  ++ue.grants_received;
  return p;
}

std::optional<ScheduledPusch> take_due_pusch(UeState& ue, SimTime at) {
  std::erase_if(ue.scheduled, [&](const ScheduledPusch& p) { return p.at < at; });
  if (ue.scheduled.empty() || ue.scheduled.front().at != at) {
    return std::nullopt;
  }
  ScheduledPusch p = ue.scheduled.front();
  // Two grants landing on one subframe merge into a single transport block.
  while (ue.scheduled.size() > 1 && ue.scheduled[1].at == at) {
    p.grant_bytes += ue.scheduled[1].grant_bytes;
    p.rb_count += ue.scheduled[1].rb_count;
    ue.scheduled.erase(ue.scheduled.begin() + 1);
  }
  ue.scheduled.erase(ue.scheduled.begin());
  return p;
}

phy::MacPdu build_pusch(UeState& ue, const ScheduledPusch& grant) {
  const std::uint16_t rnti = ue.rnti.value_or(0);
  const std::uint32_t capacity = grant.grant_bytes > phy::kBsrCeBytes ? grant.grant_bytes - phy::kBsrCeBytes : 0;
  const std::uint32_t sdu = std::min(ue.buffer_bytes, capacity);
  ue.buffer_bytes -= sdu;
  ++ue.pusch_sent;
  const phy::BsrCe bsr{phy::kDataBearerLcid, ue.buffer_bytes};
  if (sdu > 0) {
    return phy::MacPdu::data(rnti, sdu, bsr);
  }
  return phy::MacPdu::padding(rnti, capacity, bsr);
}

std::optional<phy::SchedulingRequest> maybe_send_sr(const UeState& ue, SimTime at) {
  if (!ue.rnti || !ue.sr_config || ue.buffer_bytes == 0 || !ue.scheduled.empty()) {
    return std::nullopt;
  }
  if (!ue.sr_config->is_occasion(at)) {
    return std::nullopt;
  }
  return phy::SchedulingRequest{*ue.rnti, *ue.sr_config};
}

bool on_setup(UeState& ue, const channel::RrcSetupMessage& setup) {
  if (setup.ue_identity != ue.identity) {
    return false;
  }
  ue.rnti = setup.rnti;
  ue.sr_config = setup.sr_config;
  ue.connection_requested = false;
  ue.scheduled.clear();
  ue.power.f_db = 0.0;
  return true;
}

bool on_release(UeState& ue, const channel::RrcRelease& release) {
  if (!ue.rnti || *ue.rnti != release.rnti) {
    return false;
  }
  ue.rnti.reset();
  ue.sr_config.reset();
  ue.scheduled.clear();
  return true;
}

double pusch_tx_power(const UeState& ue, int rb_count) { return compute_tx_power(ue.power, ue.path_loss_db, rb_count); }

}  // namespace ulsim::ue
