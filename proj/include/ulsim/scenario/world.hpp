#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ulsim/attacker/attacker.hpp"
#include "ulsim/channel/transmission.hpp"
#include "ulsim/core/engine.hpp"
#include "ulsim/core/event_log.hpp"
#include "ulsim/enb/enb.hpp"
#include "ulsim/localizer/sweep.hpp"
#include "ulsim/scenario/scenario.hpp"
#include "ulsim/ue/ue.hpp"

namespace ulsim::scenario {

/// Everything radiated in the current subframe, plus the previous
/// subframe's uplink (the eNB decodes uplink one subframe late).
struct Air {
  std::optional<channel::Transmission> enb_downlink;
  std::vector<channel::Transmission> injected_downlink;
  std::vector<channel::Transmission> uplink;
  std::vector<channel::Transmission> last_uplink;
};

struct VictimPusch {
  SimTime at;
  double tx_dbm = 0.0;
  phy::MacPdu pdu;
};

struct InjectionPower {
  /// Uplink level while the victim runs its normal power control.
  double uplink_dbm = 0.0;
  /// Uplink level once the attacker is boosting the victim to P_CMAX.
  double uplink_boosted_dbm = 0.0;
  double downlink_dbm = 0.0;
};

/// Attacker transmit powers: explicit values from the scenario, otherwise
/// the expected legitimate arrival at the receiver plus the margin. The
/// victim's uplink arrives at its open-loop level, or the TPC target if that
/// is higher, until boosting drives it to P_CMAX.
InjectionPower injection_power(const Scenario& s, const Position& victim);

inline constexpr std::uint64_t kVictimIdentity = 1;

class EnbNode;
class AttackerTxNode;
class AttackerRxNode;
class UeNode;
class RepeaterNode;
class SnifferNode;

/// One simulated cell for a single victim placement.
class World {
 public:
  /// `log_prefix` is prepended to every entity name in the event log.
  World(const Scenario& s, const PointSpec& point, std::uint64_t seed, EventLog* log, std::string log_prefix = {});
  ~World();
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  /// Advances one subframe. Returns false once the duration is reached.
  bool step();
  SimTime now() const { return engine_.now(); }
  bool finished() const { return engine_.finished(); }

  const Scenario& scenario() const { return s_; }
  enb::Enb& enb() { return *enb_; }
  attack::Attacker& attacker() { return *attacker_; }
  const attack::Attacker& attacker() const { return *attacker_; }
  const ue::UeState& victim() const;
  const Position& victim_position() const { return victim_pos_; }
  const InjectionPower& injection() const { return injection_; }

  /// Core-network downlink to `identity`, handed to the eNB at `at`.
  void core_delivery(SimTime at, std::uint64_t identity, channel::Bearer bearer);

  std::size_t sniffer_count() const { return sniffers_.size(); }
  const std::string& sniffer_id(std::size_t i) const;
  Position sniffer_position(std::size_t i) const;
  void start_sweeps();
  bool sweeps_done() const;
  loc::SweepProfile sweep_profile(std::size_t i) const;

  /// Fixed-bearing measurement of `samples` victim readings.
  void start_probe(std::size_t sniffer, double bearing_deg, int samples);
  bool probe_done(std::size_t sniffer) const;
  double probe_mean_dbm(std::size_t sniffer) const;

  /// Every PUSCH the victim transmitted, in time order.
  const std::vector<VictimPusch>& victim_pusch() const { return victim_pusch_; }

 private:
  friend class EnbNode;
  friend class AttackerTxNode;
  friend class AttackerRxNode;
  friend class UeNode;
  friend class RepeaterNode;
  friend class SnifferNode;

  Scenario s_;
  Position victim_pos_;
  std::string prefix_;
  EventLog* log_;
  InjectionPower injection_;
  Engine engine_;
  Air air_;
  std::multimap<std::int64_t, std::pair<std::uint64_t, channel::Bearer>> core_queue_;
  std::unique_ptr<enb::Enb> enb_;
  std::unique_ptr<attack::Attacker> attacker_;
  std::unique_ptr<EnbNode> enb_node_;
  std::unique_ptr<AttackerTxNode> attacker_tx_;
  std::unique_ptr<AttackerRxNode> attacker_rx_;
  std::vector<std::unique_ptr<UeNode>> ues_;
  std::unique_ptr<RepeaterNode> repeater_;
  std::vector<std::unique_ptr<SnifferNode>> sniffers_;
  std::vector<VictimPusch> victim_pusch_;
};

}  // namespace ulsim::scenario
