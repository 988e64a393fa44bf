#include "ulsim/scenario/scenario.hpp"

#include <set>

#include "ulsim/core/errors.hpp"

namespace ulsim::scenario {

namespace {

struct KindName {
  Kind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {Kind::Calibration, "calibration"},     {Kind::ShadowArea, "shadow_area"},
    {Kind::SchedManip, "sched_manip"},      {Kind::BoostRace, "boost_race"},
    {Kind::Repeater, "repeater"},           {Kind::Localization, "localization"},
    {Kind::AcquisitionCrowd, "acquisition_crowd"},
};

bool needs_world(Kind k) { return k != Kind::Calibration && k != Kind::AcquisitionCrowd; }

void require_finite(const Position& p, const std::string& what) {
  if (!is_finite(p)) {
    throw ConfigError(what + ": position must be finite");
  }
}

}  // namespace

const char* to_string(Kind k) {
  for (const KindName& kn : kKinds) {
    if (kn.kind == k) {
      return kn.name;
    }
  }
  return "?";
}

std::optional<Kind> kind_from_string(const std::string& s) {
  for (const KindName& kn : kKinds) {
    if (s == kn.name) {
      return kn.kind;
    }
  }
  return std::nullopt;
}

const SnifferSpec* Scenario::find_sniffer(const std::string& id) const {
  for (const SnifferSpec& s : sniffers) {
    if (s.id == id) {
      return &s;
    }
  }
  return nullptr;
}

void Scenario::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (name.empty()) {
    throw ConfigError("scenario name is empty");
  }
  if (duration_ms < 1) {
    throw ConfigError("duration_ms must be >= 1");
  }
  channel.validate();
  ue_power.validate();

  if (kind == Kind::Calibration) {
    const auto n = calibration.distances_m.size();
    if (n < 2 || calibration.tx_power_dbm.size() != n || calibration.rsrp_dbm.size() != n) {
      throw ConfigError("calibration table needs >= 2 rows of equal length");
    }
    return;
  }
  if (kind == Kind::AcquisitionCrowd) {
    attacker.config.pattern.validate();
    if (crowd.users < 1 || crowd.trials < 0 || crowd.adversarial_trials < 0 || crowd.duration_ms < 1) {
      throw ConfigError("crowd parameters out of range");
    }
    enb.config.validate();
    return;
  }
  if (!needs_world(kind)) {
    return;
  }

  enb.config.validate();
  attacker.config.validate();
  victim_traffic.validate();
  require_finite(enb.position, "enb");
  require_finite(attacker.position, "attacker");
  if (schedule.acquisition_start_ms < 0 || schedule.sched_manip_timeout_ms < 0 || schedule.boost_settle_ms < 0 ||
      schedule.hold_ms < 0) {
    throw ConfigError("schedule durations must be >= 0");
  }
  if (kind == Kind::BoostRace && (boost_race.bin_ms < 1 || boost_race.deadline_ms < 0)) {
    throw ConfigError("boost_race bin_ms must be >= 1 and deadline_ms >= 0");
  }

  std::set<std::string> ids;
  auto claim = [&](const std::string& id) {
    if (id.empty()) {
      throw ConfigError("entity id is empty");
    }
    if (!ids.insert(id).second) {
      throw ConfigError("duplicate entity id: " + id);
    }
  };
  claim(enb.id);
  claim(attacker.id);
  claim(victim_id);
  for (const UeSpec& u : ues) {
    claim(u.id);
    require_finite(u.position, u.id);
    u.traffic.validate();
  }
  for (const SnifferSpec& s : sniffers) {
    claim(s.id);
    require_finite(s.position, s.id);
    s.sweep.validate();
  }
  if (repeater) {
    claim(repeater->id);
    repeater->validate();
  }

  if (points.empty()) {
    throw ConfigError("at least one victim point is required");
  }
  std::set<std::string> labels;
  for (const PointSpec& p : points) {
    if (p.label.empty() || !labels.insert(p.label).second) {
      throw ConfigError("point labels must be unique and non-empty");
    }
    require_finite(p.victim, p.label);
    for (const auto& [sid, pos] : p.sniffers) {
      if (find_sniffer(sid) == nullptr) {
        throw ConfigError("point " + p.label + " moves unknown sniffer " + sid);
      }
      require_finite(pos, sid);
    }
  }
  if (!report_sniffer.empty() && find_sniffer(report_sniffer) == nullptr) {
    throw ConfigError("report_sniffer refers to unknown sniffer " + report_sniffer);
  }

  switch (kind) {
    case Kind::Localization:
      if (sniffers.size() < 2) {
        throw ConfigError("localization needs at least two sniffers");
      }
      if (!(area_width_m > 0.0 && area_height_m > 0.0)) {
        throw ConfigError("localization needs a positive area");
      }
      break;
    case Kind::ShadowArea:
      if (sniffers.empty()) {
        throw ConfigError("shadow_area needs a sniffer");
      }
      break;
    case Kind::Repeater:
      if (!repeater || sniffers.empty()) {
        throw ConfigError("repeater experiment needs a repeater and a sniffer");
      }
      if (repeater_test.measure_samples < 1) {
        throw ConfigError("measure_samples must be >= 1");
      }
      break;
    default:
      break;
  }
}

}  // namespace ulsim::scenario
