#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ulsim/channel/transmission.hpp"
#include "ulsim/core/event_log.hpp"
#include "ulsim/core/sim_time.hpp"
#include "ulsim/enb/anomaly.hpp"
#include "ulsim/phy/bsr.hpp"
#include "ulsim/phy/dci0.hpp"
#include "ulsim/phy/scheduling_request.hpp"

namespace ulsim::enb {

enum class RntiState { Active, Expired };

enum class GrantKind { Sr, Bsr };

struct UplinkGrant {
  std::uint16_t rnti = 0;
  int rb_count = 1;
  std::uint32_t grant_bytes = 0;
  GrantKind kind = GrantKind::Bsr;
  SimTime issued;
  /// PUSCH subframe: issued + k_grant.
  SimTime scheduled;
};

struct RntiRecord {
  std::uint16_t rnti = 0;
  std::uint64_t ue_identity = 0;
  phy::SchedulingRequestConfig sr_config;
  SimTime connected;
  SimTime last_activity;
  RntiState state = RntiState::Active;
  /// Queued plus issued-but-not-yet-received grant bytes.
  std::uint32_t pending_grant_bytes = 0;
};

/// Bang-bang closed-loop power control around a receive-power target.
struct TpcPolicy {
  double target_rx_power_dbm = -85.0;
  double hysteresis_db = 2.0;
  /// Minimum spacing between non-zero corrections to one RNTI.
  std::int64_t min_interval_ms = 10;
  bool enabled = true;

  void validate() const;
};

/// 0 (-1 dB) above target+h, 2 (+1 dB) below target-h, else 1. Never 3.
std::uint8_t tpc_decision(const TpcPolicy& policy, double measured_rx_dbm);

struct EnbConfig {
  int k_grant = 4;
  std::uint32_t grant_quantum_bytes = 16;
  std::uint32_t sr_grant_bytes = 16;
  /// Transport capacity of one RB at the modelled MCS.
  std::uint32_t rb_bytes = 16;
  std::int64_t inactivity_timeout_ms = 15000;
  int sr_period_ms = 10;
  int pucch_resources = 2048;
  std::uint16_t first_rnti = 0x003D;
  std::uint16_t last_rnti = 0xFFF3;
  int n_rb = phy::kDefaultUplinkRbs;
  TpcPolicy tpc;
  /// Weight of a new PUSCH power sample in the receive-power average.
  double rx_ewma_alpha = 0.25;
  AnomalyThresholds anomaly;

  void validate() const;
};

/// Single-cell eNB MAC/RRC: RNTI lifecycle, SR/BSR scheduling, uplink TPC.
///
/// Time discipline: uplink received in subframe t is handed in during
/// subframe t+1 (before build_downlink for t+1), so a grant reacting to it
/// is issued at t+1 and scheduled at t+1+k_grant.
class Enb {
 public:
  explicit Enb(EnbConfig cfg = {}, EventLog* log = nullptr, std::string id = "enb");

  const EnbConfig& config() const { return cfg_; }

  std::pair<RntiRecord, channel::RrcSetupMessage> rrc_connect(std::uint64_t ue_identity, SimTime at);

  std::optional<UplinkGrant> on_scheduling_request(const phy::SchedulingRequest& sr, SimTime at);
  std::vector<UplinkGrant> on_bsr(const phy::MacPdu& pdu, SimTime at);

  /// Decoded PUSCH transmitted in `tx_time` with the given receive power.
  /// PDUs without a matching grant are dropped.
  void on_pusch(const phy::MacPdu& pdu, double rx_dbm, SimTime tx_time, SimTime at);

  void on_connection_request(const channel::ConnectionRequest& req, SimTime at);

  /// Downlink delivery from the core network; connects an idle UE first.
  void deliver_downlink(std::uint64_t ue_identity, channel::Bearer bearer, SimTime at);

  std::vector<std::uint16_t> expire_idle(SimTime at);

  /// Issues at most one DCI 0 per RNTI and flushes RRC/bearer traffic.
  channel::DownlinkSubframe build_downlink(SimTime at);

  const RntiRecord* find(std::uint16_t rnti) const;
  const RntiRecord* find_active_by_identity(std::uint64_t ue_identity) const;
  std::size_t active_count() const { return active_by_identity_.size(); }

  std::int64_t sr_on_expired_count() const { return sr_on_expired_; }
  std::int64_t grants_issued(std::uint16_t rnti) const;
  std::int64_t pdus_received(std::uint16_t rnti) const;
  const AnomalyMonitor& anomalies() const { return anomaly_; }
  const std::vector<UplinkGrant>& issued_log() const { return issued_log_; }

 private:
  struct Slot {
    RntiRecord rec;
    std::deque<UplinkGrant> queue;
    std::vector<UplinkGrant> in_flight;
    double rx_avg_dbm = 0.0;
    bool has_rx = false;
    std::int64_t last_tpc_ms = std::numeric_limits<std::int64_t>::min() / 2;
    std::int64_t grants_issued = 0;
    std::int64_t pdus = 0;
  };

  Slot* active_slot(std::uint16_t rnti);
  std::uint32_t pending_bytes(const Slot& s, SimTime at) const;
  void enqueue(Slot& s, GrantKind kind, std::uint32_t bytes, SimTime at);
  std::uint16_t allocate_rnti();
  int allocate_pucch_resource();
  void touch(Slot& s, SimTime at);
  void log(SimTime at, const char* event, std::optional<std::uint16_t> rnti = {}, std::optional<double> v = {},
           std::string extra = {});

  EnbConfig cfg_;
  EventLog* log_;
  std::string id_;
  std::map<std::uint16_t, Slot> slots_;
  std::map<std::uint64_t, std::uint16_t> active_by_identity_;
  /// Identities with queued or in-flight grants.
  std::set<std::uint64_t> busy_;
  std::vector<bool> pucch_used_;
  std::uint16_t next_rnti_;
  int next_pucch_ = 0;
  /// No active RNTI can expire before this time.
  std::int64_t expiry_bound_ms_ = 0;
  std::int64_t sr_on_expired_ = 0;
  AnomalyMonitor anomaly_;
  channel::DownlinkSubframe outbox_;
  std::vector<UplinkGrant> issued_log_;
};

}  // namespace ulsim::enb
