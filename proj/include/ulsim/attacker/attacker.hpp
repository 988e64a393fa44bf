#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ulsim/attacker/acquisition.hpp"
#include "ulsim/channel/transmission.hpp"
#include "ulsim/core/event_log.hpp"
#include "ulsim/core/sim_time.hpp"
#include "ulsim/phy/bsr.hpp"
#include "ulsim/phy/scheduling_request.hpp"

namespace ulsim::attack {

struct AttackState {
  std::optional<std::uint16_t> target_rnti;
  std::optional<phy::SchedulingRequestConfig> sr_config;
  double duty_cycle = 0.10;
  int boost_subframe = 9;
  double injected_tx_power_dbm = 30.0;

  void validate() const;
};

/// Victim identity the attacker transmits under.
struct ForgedEndpoint {
  std::uint16_t rnti = 0;
  phy::SchedulingRequestConfig sr_config;
};

/// Throws NotObservedError when the target or its SR configuration is unknown.
ForgedEndpoint forge_uplink_channel(const AttackState& state);

struct AttackConfig {
  double duty_cycle = 0.10;
  std::int64_t duty_window_ms = 100;
  int boost_subframe = 9;
  double uplink_injection_dbm = 30.0;
  double downlink_injection_dbm = 30.0;
  std::uint32_t fake_buffer_bytes = 200;
  std::uint8_t fake_lcid = phy::kDataBearerLcid;
  int k_grant = 4;
  std::uint32_t rb_bytes = 16;
  std::int64_t grant_wait_ms = 30;
  std::int64_t verify_ms = 20;
  SilentPattern pattern;
  std::int64_t burst_merge_ms = 1000;

  void validate() const;
};

struct UplinkInjection {
  channel::PhyChannel channel = channel::PhyChannel::Pusch;
  channel::Payload payload;
};

struct DutyWindow {
  std::int64_t window_start_ms = 0;
  int used = 0;
  int granted = 0;
};

/// The attacker sees only what its receiver decodes from the downlink and
/// acts only by injecting transmissions.
class Attacker {
 public:
  explicit Attacker(AttackConfig cfg = {}, EventLog* log = nullptr, std::string id = "attacker");

  const AttackConfig& config() const { return cfg_; }
  const AttackState& state() const { return state_; }

  // Receiver side.
  void observe_downlink(const channel::DownlinkSubframe& sf, SimTime at);
  const std::vector<DownlinkObservation>& observations() const { return observations_; }
  const std::vector<ObservedSetup>& setups() const { return setups_; }

  // Operator steps.
  /// `window_start` is when the first silent message went out; `extra_bursts`
  /// raises K after an ambiguous match.
  std::uint16_t acquire(SimTime window_start, SimTime window_end, int extra_bursts = 0);
  void set_target(std::uint16_t rnti);
  phy::SchedulingRequestConfig capture_config();
  ForgedEndpoint forge();
  bool forged() const { return forged_.has_value(); }
  void enable_sched_manip(bool on) { sched_enabled_ = on; }
  void enable_boost(bool on) { boost_enabled_ = on; }
  bool boost_enabled() const { return boost_enabled_; }

  // Per-subframe hooks.
  std::optional<channel::DownlinkSubframe> downlink_injection(SimTime now);
  std::vector<UplinkInjection> uplink_injection(SimTime now);

  /// Victim PUSCH expected at t, from decoded DCI 0 or an own fake grant.
  bool victim_scheduled(SimTime t) const { return victim_sched_.count(t.ms()) != 0; }
  bool injected_uplink(SimTime t) const { return injected_ul_.count(t.ms()) != 0; }
  bool clean_victim_subframe(SimTime t) const { return victim_scheduled(t) && !injected_uplink(t); }

  int steps_ok() const { return steps_ok_; }
  int steps_lost() const { return steps_lost_; }
  int boosts_sent() const { return boosts_sent_; }
  std::vector<DutyWindow> duty_windows() const;
  /// Used over granted subframes since the attack started.
  double duty_ratio() const;
  /// used - duty * granted since the attack started; the bound is <= 1.
  double duty_excess() const;
  /// Largest used - duty * granted inside one window; a new step is only
  /// started while this stays <= 1.
  double worst_duty_excess() const;

 private:
  enum class Step { Idle, WaitGrant, Inject, Verify };

  bool duty_allows(SimTime now) const;
  void log(SimTime at, const char* event, std::optional<double> v = {}, std::string extra = {});

  AttackConfig cfg_;
  EventLog* log_;
  std::string id_;
  AttackState state_;
  std::optional<ForgedEndpoint> forged_;
  std::vector<DownlinkObservation> observations_;
  std::vector<ObservedSetup> setups_;
  bool sched_enabled_ = false;
  bool boost_enabled_ = false;
  Step step_ = Step::Idle;
  SimTime step_since_;
  SimTime inject_at_;
  std::int64_t last_legit_sched_ms_ = -1;
  std::set<std::int64_t> victim_sched_;
  std::set<std::int64_t> injected_ul_;
  std::map<std::int64_t, DutyWindow> duty_;
  std::int64_t used_total_ = 0;
  std::int64_t granted_total_ = 0;
  int steps_ok_ = 0;
  int steps_lost_ = 0;
  int boosts_sent_ = 0;
};

}  // namespace ulsim::attack
