#include "ulsim/enb/enb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulsim/core/errors.hpp"

namespace ulsim::enb {

void TpcPolicy::validate() const {
  if (!(hysteresis_db >= 0.0)) {
    throw ConfigError("TPC hysteresis must be >= 0");
  }
  if (min_interval_ms < 0) {
    throw ConfigError("TPC min_interval_ms must be >= 0");
  }
}

std::uint8_t tpc_decision(const TpcPolicy& policy, double measured_rx_dbm) {
  if (measured_rx_dbm > policy.target_rx_power_dbm + policy.hysteresis_db) {
    return 0;
  }
  if (measured_rx_dbm < policy.target_rx_power_dbm - policy.hysteresis_db) {
    return 2;
  }
  return 1;
}

void EnbConfig::validate() const {
  if (k_grant < 1) {
    throw ConfigError("k_grant must be >= 1");
  }
  if (grant_quantum_bytes == 0 || sr_grant_bytes < phy::kBsrCeBytes || rb_bytes == 0) {
    throw ConfigError("grant sizes must be positive and fit a BSR");
  }
  if (inactivity_timeout_ms < 1) {
    throw ConfigError("inactivity timeout must be >= 1 ms");
  }
  if (pucch_resources < 1 || pucch_resources > phy::kMaxPucchResourceIndex + 1) {
    throw ConfigError("pucch_resources must be 1..2048");
  }
  if (first_rnti > last_rnti) {
    throw ConfigError("empty RNTI range");
  }
  if (!(rx_ewma_alpha > 0.0 && rx_ewma_alpha <= 1.0)) {
    throw ConfigError("rx_ewma_alpha must be in (0, 1]");
  }
  tpc.validate();
  (void)phy::SchedulingRequestConfig::from_period_offset(0, sr_period_ms, 0);
}

Enb::Enb(EnbConfig cfg, EventLog* log, std::string id)
    : cfg_(cfg), log_(log), id_(std::move(id)), next_rnti_(cfg.first_rnti), anomaly_(cfg.anomaly) {
  cfg_.validate();
  pucch_used_.assign(static_cast<std::size_t>(cfg_.pucch_resources), false);
}

void Enb::log(SimTime at, const char* event, std::optional<std::uint16_t> rnti, std::optional<double> v,
              std::string extra) {
  if (log_ != nullptr) {
    log_->record(at, id_, event, rnti, v, std::move(extra));
  }
}

Enb::Slot* Enb::active_slot(std::uint16_t rnti) {
  auto it = slots_.find(rnti);
  if (it == slots_.end() || it->second.rec.state != RntiState::Active) {
    return nullptr;
  }
  return &it->second;
}

const RntiRecord* Enb::find(std::uint16_t rnti) const {
  auto it = slots_.find(rnti);
  return it == slots_.end() ? nullptr : &it->second.rec;
}

const RntiRecord* Enb::find_active_by_identity(std::uint64_t ue_identity) const {
  auto it = active_by_identity_.find(ue_identity);
  return it == active_by_identity_.end() ? nullptr : find(it->second);
}

std::int64_t Enb::grants_issued(std::uint16_t rnti) const {
  auto it = slots_.find(rnti);
  return it == slots_.end() ? 0 : it->second.grants_issued;
}

std::int64_t Enb::pdus_received(std::uint16_t rnti) const {
  auto it = slots_.find(rnti);
  return it == slots_.end() ? 0 : it->second.pdus;
}

std::uint16_t Enb::allocate_rnti() {
  const int span = cfg_.last_rnti - cfg_.first_rnti + 1;
  for (int i = 0; i < span; ++i) {
    const std::uint16_t cand = next_rnti_;
    next_rnti_ = cand == cfg_.last_rnti ? cfg_.first_rnti : static_cast<std::uint16_t>(cand + 1);
    auto it = slots_.find(cand);
    if (it == slots_.end() || it->second.rec.state == RntiState::Expired) {
      return cand;
    }
  }
  throw CapacityError("RNTI space exhausted");
}

int Enb::allocate_pucch_resource() {
  for (int i = 0; i < cfg_.pucch_resources; ++i) {
    const int cand = next_pucch_;
    next_pucch_ = (next_pucch_ + 1) % cfg_.pucch_resources;
    if (!pucch_used_[static_cast<std::size_t>(cand)]) {
      pucch_used_[static_cast<std::size_t>(cand)] = true;
      return cand;
    }
  }
  throw CapacityError("PUCCH SR resources exhausted");
}

std::pair<RntiRecord, channel::RrcSetupMessage> Enb::rrc_connect(std::uint64_t ue_identity, SimTime at) {
  if (active_by_identity_.count(ue_identity) != 0) {
    throw ConfigError("UE already has an active RNTI");
  }
  const std::uint16_t rnti = allocate_rnti();
  const int resource = allocate_pucch_resource();
  Slot slot;
  slot.rec.rnti = rnti;
  slot.rec.ue_identity = ue_identity;
  slot.rec.sr_config = phy::SchedulingRequestConfig::from_period_offset(
      static_cast<std::uint16_t>(resource), cfg_.sr_period_ms, resource % cfg_.sr_period_ms);
  slot.rec.connected = at;
  slot.rec.last_activity = at;
  slots_[rnti] = slot;
  active_by_identity_[ue_identity] = rnti;
  expiry_bound_ms_ = std::min(expiry_bound_ms_, at.ms() + cfg_.inactivity_timeout_ms);
  channel::RrcSetupMessage setup{rnti, ue_identity, slot.rec.sr_config};
  outbox_.setups.push_back(setup);
  outbox_.bearer_events.push_back({rnti, channel::Bearer::Srb});
  log(at, "rnti_assigned", rnti, std::nullopt,
      "pucch=" + std::to_string(resource) + ";isr=" + std::to_string(slot.rec.sr_config.sr_config_index));
  return {slot.rec, setup};
}

void Enb::touch(Slot& s, SimTime at) {
  if (at > s.rec.last_activity) {
    s.rec.last_activity = at;
  }
}

std::uint32_t Enb::pending_bytes(const Slot& s, SimTime at) const {
  std::uint32_t total = 0;
  for (const UplinkGrant& g : s.queue) {
    total += g.grant_bytes;
  }
  for (const UplinkGrant& g : s.in_flight) {
    if (g.scheduled >= at) {
      total += g.grant_bytes;
    }
  }
  return total;
}

void Enb::enqueue(Slot& s, GrantKind kind, std::uint32_t bytes, SimTime at) {
  SimTime planned = at;
  if (!s.queue.empty()) {
    planned = std::max(planned, s.queue.back().issued.next());
  }
  for (const UplinkGrant& g : s.in_flight) {
    if (g.issued >= planned) {
      planned = g.issued.next();
    }
  }
  UplinkGrant g;
  g.rnti = s.rec.rnti;
  g.rb_count = static_cast<int>((bytes + cfg_.rb_bytes - 1) / cfg_.rb_bytes);
  g.grant_bytes = static_cast<std::uint32_t>(g.rb_count) * cfg_.rb_bytes;
  g.kind = kind;
  g.issued = planned;
  g.scheduled = planned.plus_ms(cfg_.k_grant);
  s.queue.push_back(g);
  s.rec.pending_grant_bytes = pending_bytes(s, at);
  busy_.insert(s.rec.ue_identity);
}

std::optional<UplinkGrant> Enb::on_scheduling_request(const phy::SchedulingRequest& sr, SimTime at) {
  auto it = slots_.find(sr.rnti);
  if (it == slots_.end()) {
    log(at, "sr_ignored", sr.rnti, std::nullopt, "unknown_rnti");
    return std::nullopt;
  }
  Slot& s = it->second;
  if (s.rec.state == RntiState::Expired) {
    ++sr_on_expired_;
    log(at, "sr_ignored", sr.rnti, std::nullopt, "expired_rnti");
    return std::nullopt;
  }
  if (sr.config.pucch_resource_index != s.rec.sr_config.pucch_resource_index) {
    log(at, "sr_ignored", sr.rnti, std::nullopt, "wrong_resource");
    return std::nullopt;
  }
  touch(s, at);
  if (!s.queue.empty()) {
    log(at, "sr_received", sr.rnti, std::nullopt, "grant_pending");
    return std::nullopt;
  }
  enqueue(s, GrantKind::Sr, cfg_.sr_grant_bytes, at);
  log(at, "sr_received", sr.rnti);
  return s.queue.back();
}

std::vector<UplinkGrant> Enb::on_bsr(const phy::MacPdu& pdu, SimTime at) {
  std::vector<UplinkGrant> out;
  Slot* s = active_slot(pdu.rnti);
  if (s == nullptr || !pdu.bsr) {
    return out;
  }
  touch(*s, at);
  const std::uint32_t reported = phy::decode_bsr(phy::encode_bsr(*pdu.bsr)).buffer_size_bytes;
  const std::uint32_t pending = pending_bytes(*s, at);
  const std::uint32_t need = reported > pending ? reported - pending : 0;
  const std::uint32_t n = (need + cfg_.grant_quantum_bytes - 1) / cfg_.grant_quantum_bytes;
  for (std::uint32_t i = 0; i < n; ++i) {
    enqueue(*s, GrantKind::Bsr, cfg_.grant_quantum_bytes, at);
    out.push_back(s->queue.back());
  }
  log(at, "bsr_received", pdu.rnti, std::nullopt,
      "reported=" + std::to_string(reported) + ";grants=" + std::to_string(n));
  return out;
}

void Enb::on_pusch(const phy::MacPdu& pdu, double rx_dbm, SimTime tx_time, SimTime at) {
  Slot* s = active_slot(pdu.rnti);
  if (s == nullptr) {
    log(at, "pusch_dropped", pdu.rnti, rx_dbm, "inactive_rnti");
    return;
  }
  auto g = std::find_if(s->in_flight.begin(), s->in_flight.end(),
                        [&](const UplinkGrant& x) { return x.scheduled == tx_time; });
  if (g == s->in_flight.end()) {
    log(at, "pusch_dropped", pdu.rnti, rx_dbm, "no_grant");
    return;
  }
  s->in_flight.erase(g);
  ++s->pdus;
  touch(*s, at);
  if (s->has_rx) {
    s->rx_avg_dbm += cfg_.rx_ewma_alpha * (rx_dbm - s->rx_avg_dbm);
  } else {
    s->rx_avg_dbm = rx_dbm;
    s->has_rx = true;
  }
  log(at, "pusch_rx", pdu.rnti, rx_dbm,
      std::string(pdu.kind == phy::PayloadKind::Padding ? "padding" : "data") +
          (pdu.bsr ? ";bsr=" + std::to_string(pdu.bsr->buffer_size_bytes) : ""));
  if (anomaly_.observe({tx_time, pdu})) {
    const AnomalyFlags f = anomaly_.flags_for(pdu.rnti);
    log(at, "anomaly", pdu.rnti, std::nullopt,
        std::string(f.zero_bsr_repeated_uplink ? "zero_bsr_repeated_uplink" : "") +
            (f.padding_only ? ";padding_only" : ""));
  }
  if (pdu.bsr) {
    on_bsr(pdu, at);
  }
}

void Enb::on_connection_request(const channel::ConnectionRequest& req, SimTime at) {
  if (active_by_identity_.count(req.ue_identity) != 0) {
    return;
  }
  rrc_connect(req.ue_identity, at);
}

void Enb::deliver_downlink(std::uint64_t ue_identity, channel::Bearer bearer, SimTime at) {
  auto it = active_by_identity_.find(ue_identity);
  std::uint16_t rnti = 0;
  if (it == active_by_identity_.end()) {
    rnti = rrc_connect(ue_identity, at).first.rnti;
  } else {
    rnti = it->second;
  }
  touch(slots_.at(rnti), at);
  outbox_.bearer_events.push_back({rnti, bearer});
  log(at, "dl_delivery", rnti, std::nullopt, channel::to_string(bearer));
}

std::vector<std::uint16_t> Enb::expire_idle(SimTime at) {
  std::vector<std::uint16_t> expired;
  if (at.ms() < expiry_bound_ms_) {
    return expired;
  }
  expiry_bound_ms_ = std::numeric_limits<std::int64_t>::max();
  for (auto it = active_by_identity_.begin(); it != active_by_identity_.end();) {
    Slot& s = slots_.at(it->second);
    const std::int64_t idle = at.ms() - s.rec.last_activity.ms();
    if (idle >= cfg_.inactivity_timeout_ms) {
      s.rec.state = RntiState::Expired;
      s.queue.clear();
      s.in_flight.clear();
      s.rec.pending_grant_bytes = 0;
      pucch_used_[s.rec.sr_config.pucch_resource_index] = false;
      expired.push_back(s.rec.rnti);
      outbox_.releases.push_back({s.rec.rnti});
      log(at, "rnti_expired", s.rec.rnti, std::nullopt, "idle_ms=" + std::to_string(idle));
      it = active_by_identity_.erase(it);
    } else {
      expiry_bound_ms_ = std::min(expiry_bound_ms_, s.rec.last_activity.ms() + cfg_.inactivity_timeout_ms);
      ++it;
    }
  }
  return expired;
}

channel::DownlinkSubframe Enb::build_downlink(SimTime at) {
  for (auto it = busy_.begin(); it != busy_.end();) {
    const auto active = active_by_identity_.find(*it);
    if (active == active_by_identity_.end()) {
      it = busy_.erase(it);
      continue;
    }
    const std::uint16_t rnti = active->second;
    Slot& s = slots_.at(rnti);
    std::erase_if(s.in_flight, [&](const UplinkGrant& g) { return g.scheduled < at; });
    if (s.queue.empty() && s.in_flight.empty()) {
      s.rec.pending_grant_bytes = 0;
      it = busy_.erase(it);
      continue;
    }
    ++it;
    if (s.queue.empty() || s.queue.front().issued > at) {
      s.rec.pending_grant_bytes = pending_bytes(s, at);
      continue;
    }
    UplinkGrant g = s.queue.front();
    s.queue.pop_front();
    g.issued = at;
    g.scheduled = at.plus_ms(cfg_.k_grant);
    std::uint8_t tpc = 1;
    if (cfg_.tpc.enabled && s.has_rx && at.ms() - s.last_tpc_ms >= cfg_.tpc.min_interval_ms) {
      tpc = tpc_decision(cfg_.tpc, s.rx_avg_dbm);
      if (tpc != 1) {
        s.last_tpc_ms = at.ms();
      }
      // Predictive correction for the step just issued.
      s.rx_avg_dbm += phy::tpc_accumulated_delta_db(tpc);
    }
    phy::Dci0 dci;
    dci.rnti = rnti;
    dci.rb = phy::RbAllocation{0, g.rb_count};
    dci.tpc_command = tpc;
    outbox_.dcis.push_back(dci);
    s.in_flight.push_back(g);
    ++s.grants_issued;
    issued_log_.push_back(g);
    s.rec.pending_grant_bytes = pending_bytes(s, at);
    log(at, "dci0_issued", rnti, phy::tpc_accumulated_delta_db(tpc),
        std::string(g.kind == GrantKind::Sr ? "sr" : "bsr") + ";sched=" + std::to_string(g.scheduled.ms()));
  }
  channel::DownlinkSubframe out = std::move(outbox_);
  outbox_ = {};
  return out;
}

}  // namespace ulsim::enb
