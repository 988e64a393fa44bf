#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ulsim/attacker/attacker.hpp"
#include "ulsim/channel/channel_model.hpp"
#include "ulsim/channel/repeater.hpp"
#include "ulsim/core/geometry.hpp"
#include "ulsim/enb/enb.hpp"
#include "ulsim/localizer/bearing.hpp"
#include "ulsim/localizer/sweep.hpp"
#include "ulsim/ue/power_control.hpp"
#include "ulsim/ue/traffic.hpp"

namespace ulsim::scenario {

inline constexpr int kSchemaVersion = 1;
/// Extra silent messages sent after an ambiguous RNTI match.
inline constexpr int kMaxExtraBursts = 2;

enum class Kind { Calibration, ShadowArea, SchedManip, BoostRace, Repeater, Localization, AcquisitionCrowd };
const char* to_string(Kind k);
std::optional<Kind> kind_from_string(const std::string& s);

struct EnbSpec {
  std::string id = "enb";
  Position position;
  double tx_power_dbm = 15.0;
  enb::EnbConfig config;
};

struct UeSpec {
  std::string id;
  Position position;
  ue::TrafficProfile traffic;
};

struct SnifferSpec {
  std::string id;
  Position position;
  loc::SweepConfig sweep;
};

struct AttackerSpec {
  std::string id = "attacker";
  Position position;
  attack::AttackConfig config;
  /// Unset means derived from the link budget with injection_margin_db.
  std::optional<double> uplink_injection_dbm;
  std::optional<double> downlink_injection_dbm;
  double injection_margin_db = 10.0;
};

/// One victim placement; sniffers may be moved per point.
struct PointSpec {
  std::string label;
  Position victim;
  std::map<std::string, Position> sniffers;
};

struct ScheduleSpec {
  std::int64_t acquisition_start_ms = 500;
  /// Maximum time spent waiting for the first manipulation step to land.
  std::int64_t sched_manip_timeout_ms = 3000;
  std::int64_t boost_settle_ms = 2000;
  /// Attack hold time for the scheduling and boost-race experiments.
  std::int64_t hold_ms = 60000;
};

struct CalibrationSpec {
  std::vector<double> distances_m;
  std::vector<double> tx_power_dbm;
  std::vector<double> rsrp_dbm;
  double reference_power_dbm = 15.0;
  double rsrp_tolerance_db = 2.0;
  double tx_tolerance_db = 3.0;
};

struct CrowdSpec {
  int users = 862;
  double srb_drb1_per_s = 1.0 / 60.0;
  double drb2_per_s = 0.1;
  int trials = 10;
  int adversarial_trials = 100;
  int near_miss_users_per_kind = 4;
  std::int64_t duration_ms = 60000;
};

struct RepeaterTestSpec {
  int measure_samples = 400;
  double delta_threshold_db = 5.0;
};

struct BoostRaceSpec {
  /// Steady state: from some bin on, every later bin's median victim PUSCH
  /// power lies within this much of P_CMAX.
  double steady_band_db = 1.0;
  std::int64_t bin_ms = 1000;
  std::int64_t deadline_ms = 120000;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  Kind kind = Kind::Localization;
  std::uint64_t seed = 1;
  std::int64_t duration_ms = 180000;
  double area_width_m = 0.0;
  double area_height_m = 0.0;
  double area_margin_m = 1.0;
  channel::ChannelModel channel;
  EnbSpec enb;
  ue::PowerControlState ue_power;
  std::string victim_id = "victim";
  ue::TrafficProfile victim_traffic;
  std::vector<PointSpec> points;
  std::vector<UeSpec> ues;
  std::optional<channel::RepeaterModel> repeater;
  std::vector<SnifferSpec> sniffers;
  AttackerSpec attacker;
  bool sched_manip = true;
  bool power_boost = true;
  ScheduleSpec schedule;
  loc::BearingOptions bearing;
  double max_residual_m = 1.0;
  /// Sniffer whose SNR goes into the metrics row; defaults to the first.
  std::string report_sniffer;
  CalibrationSpec calibration;
  CrowdSpec crowd;
  RepeaterTestSpec repeater_test;
  BoostRaceSpec boost_race;

  /// Throws ConfigError describing the first violation.
  void validate() const;
  const SnifferSpec* find_sniffer(const std::string& id) const;
};

}  // namespace ulsim::scenario
