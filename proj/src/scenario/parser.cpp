#include "ulsim/scenario/parser.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "ulsim/core/errors.hpp"

namespace ulsim::scenario {

namespace {

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) {
  const YAML::Mark m = n.Mark();
  if (m.line >= 0) {
    throw ConfigError("line " + std::to_string(m.line + 1) + ": " + msg);
  }
  throw ConfigError(msg);
}

void expect_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) {
    fail(n, path + ": expected a mapping");
  }
}

void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  expect_map(n, path);
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(kv.first, "unknown key '" + key + "' in " + path);
    }
  }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, const std::string& path, T& out) {
  const YAML::Node n = parent[key];
  if (!n) {
    return;
  }
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, path + "." + key + ": wrong type");
  }
}

Position read_position(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() != 2) {
    fail(n, path + ": expected [x, y]");
  }
  try {
    return Position{n[0].as<double>(), n[1].as<double>()};
  } catch (const YAML::Exception&) {
    fail(n, path + ": coordinates must be numbers");
  }
}

void read_position(const YAML::Node& parent, const char* key, const std::string& path, Position& out) {
  if (parent[key]) {
    out = read_position(parent[key], path + "." + key);
  }
}

const YAML::Node& require(const YAML::Node& parent, const YAML::Node& n, const std::string& what) {
  if (!n) {
    fail(parent, "missing required key '" + what + "'");
  }
  return n;
}

void parse_channel(const YAML::Node& n, channel::ChannelModel& c) {
  check_keys(n, "channel",
             {"pl0_db", "d0_m", "exponent_n", "shadowing_sigma_db", "noise_floor_dbm", "capture_margin_db"});
  read(n, "pl0_db", "channel", c.pl0_db);
  read(n, "d0_m", "channel", c.d0_m);
  read(n, "exponent_n", "channel", c.exponent_n);
  read(n, "shadowing_sigma_db", "channel", c.shadowing_sigma_db);
  read(n, "noise_floor_dbm", "channel", c.noise_floor_dbm);
  read(n, "capture_margin_db", "channel", c.capture_margin_db);
}

void parse_enb(const YAML::Node& n, EnbSpec& e) {
  check_keys(n, "enb",
             {"id", "position", "tx_power_dbm", "k_grant", "grant_quantum_bytes", "sr_grant_bytes", "rb_bytes",
              "inactivity_timeout_ms", "sr_period_ms", "tpc"});
  read(n, "id", "enb", e.id);
  e.position = read_position(require(n, n["position"], "enb.position"), "enb.position");
  read(n, "tx_power_dbm", "enb", e.tx_power_dbm);
  read(n, "k_grant", "enb", e.config.k_grant);
  read(n, "grant_quantum_bytes", "enb", e.config.grant_quantum_bytes);
  read(n, "sr_grant_bytes", "enb", e.config.sr_grant_bytes);
  read(n, "rb_bytes", "enb", e.config.rb_bytes);
  read(n, "inactivity_timeout_ms", "enb", e.config.inactivity_timeout_ms);
  read(n, "sr_period_ms", "enb", e.config.sr_period_ms);
  if (const YAML::Node t = n["tpc"]) {
    check_keys(t, "enb.tpc", {"enabled", "target_rx_power_dbm", "hysteresis_db", "min_interval_ms", "ewma_alpha"});
    read(t, "enabled", "enb.tpc", e.config.tpc.enabled);
    read(t, "target_rx_power_dbm", "enb.tpc", e.config.tpc.target_rx_power_dbm);
    read(t, "hysteresis_db", "enb.tpc", e.config.tpc.hysteresis_db);
    read(t, "min_interval_ms", "enb.tpc", e.config.tpc.min_interval_ms);
    read(t, "ewma_alpha", "enb.tpc", e.config.rx_ewma_alpha);
  }
}

ue::TrafficProfile parse_traffic(const YAML::Node& n, const std::string& path) {
  ue::TrafficProfile t;
  if (n.IsScalar()) {
    if (n.as<std::string>() != "idle") {
      fail(n, path + ": traffic must be 'idle' or a mapping");
    }
    return t;
  }
  check_keys(n, path, {"uplink_packets_per_s", "uplink_packet_bytes", "drb1_per_s", "drb2_per_s"});
  read(n, "uplink_packets_per_s", path, t.uplink_packets_per_s);
  read(n, "uplink_packet_bytes", path, t.uplink_packet_bytes);
  read(n, "drb1_per_s", path, t.drb1_per_s);
  read(n, "drb2_per_s", path, t.drb2_per_s);
  return t;
}

void parse_sniffer(const YAML::Node& n, SnifferSpec& s, std::size_t idx) {
  const std::string path = "sniffers[" + std::to_string(idx) + "]";
  check_keys(n, path, {"id", "position", "antenna", "sweep"});
  read(n, "id", path, s.id);
  s.position = read_position(require(n, n["position"], path + ".position"), path + ".position");
  if (const YAML::Node a = n["antenna"]) {
    check_keys(a, path + ".antenna", {"g0_db", "beamwidth_3db_deg", "floor_db"});
    read(a, "g0_db", path, s.sweep.antenna.g0_db);
    read(a, "beamwidth_3db_deg", path, s.sweep.antenna.beamwidth_3db_deg);
    read(a, "floor_db", path, s.sweep.antenna.floor_db);
  }
  if (const YAML::Node w = n["sweep"]) {
    check_keys(w, path + ".sweep",
               {"start_deg", "span_deg", "step_deg", "samples_per_angle", "max_duration_ms", "noise_jitter_db"});
    read(w, "start_deg", path, s.sweep.start_deg);
    read(w, "span_deg", path, s.sweep.span_deg);
    read(w, "step_deg", path, s.sweep.step_deg);
    read(w, "samples_per_angle", path, s.sweep.samples_per_angle);
    read(w, "max_duration_ms", path, s.sweep.max_duration_ms);
    read(w, "noise_jitter_db", path, s.sweep.noise_jitter_db);
  }
}

void read_power_or_auto(const YAML::Node& parent, const char* key, std::optional<double>& out) {
  const YAML::Node n = parent[key];
  if (!n) {
    return;
  }
  if (n.IsScalar() && n.as<std::string>() == "auto") {
    out.reset();
    return;
  }
  try {
    out = n.as<double>();
  } catch (const YAML::Exception&) {
    fail(n, std::string("attacker.") + key + ": expected a number or 'auto'");
  }
}

void parse_attacker(const YAML::Node& n, AttackerSpec& a) {
  check_keys(n, "attacker",
             {"id", "position", "uplink_injection_dbm", "downlink_injection_dbm", "injection_margin_db",
              "duty_cycle", "duty_window_ms", "boost_subframe", "fake_buffer_bytes", "fake_lcid", "pattern"});
  read(n, "id", "attacker", a.id);
  read_position(n, "position", "attacker", a.position);
  read_power_or_auto(n, "uplink_injection_dbm", a.uplink_injection_dbm);
  read_power_or_auto(n, "downlink_injection_dbm", a.downlink_injection_dbm);
  read(n, "injection_margin_db", "attacker", a.injection_margin_db);
  read(n, "duty_cycle", "attacker", a.config.duty_cycle);
  read(n, "duty_window_ms", "attacker", a.config.duty_window_ms);
  read(n, "boost_subframe", "attacker", a.config.boost_subframe);
  read(n, "fake_buffer_bytes", "attacker", a.config.fake_buffer_bytes);
  int lcid = a.config.fake_lcid;
  read(n, "fake_lcid", "attacker", lcid);
  if (lcid < 0 || lcid > phy::kMaxLcid) {
    fail(n["fake_lcid"], "attacker.fake_lcid out of range");
  }
  a.config.fake_lcid = static_cast<std::uint8_t>(lcid);
  if (const YAML::Node p = n["pattern"]) {
    check_keys(p, "attacker.pattern", {"bursts", "gap_ms", "tolerance_ms", "burst_merge_ms"});
    read(p, "bursts", "attacker.pattern", a.config.pattern.burst_count);
    read(p, "gap_ms", "attacker.pattern", a.config.pattern.gap_ms);
    read(p, "tolerance_ms", "attacker.pattern", a.config.pattern.tolerance_ms);
    read(p, "burst_merge_ms", "attacker.pattern", a.config.burst_merge_ms);
  }
}

void parse_points(const YAML::Node& n, std::vector<PointSpec>& out) {
  if (!n.IsSequence()) {
    fail(n, "points: expected a list");
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string path = "points[" + std::to_string(i) + "]";
    const YAML::Node p = n[i];
    check_keys(p, path, {"label", "victim", "sniffers"});
    PointSpec ps;
    ps.label = "p" + std::to_string(i + 1);
    read(p, "label", path, ps.label);
    ps.victim = read_position(require(p, p["victim"], path + ".victim"), path + ".victim");
    if (const YAML::Node s = p["sniffers"]) {
      expect_map(s, path + ".sniffers");
      for (const auto& kv : s) {
        ps.sniffers[kv.first.as<std::string>()] = read_position(kv.second, path + ".sniffers");
      }
    }
    out.push_back(ps);
  }
}

void parse_calibration(const YAML::Node& n, CalibrationSpec& c) {
  check_keys(n, "calibration", {"reference_power_dbm", "rsrp_tolerance_db", "tx_tolerance_db", "rows"});
  read(n, "reference_power_dbm", "calibration", c.reference_power_dbm);
  read(n, "rsrp_tolerance_db", "calibration", c.rsrp_tolerance_db);
  read(n, "tx_tolerance_db", "calibration", c.tx_tolerance_db);
  const YAML::Node rows = require(n, n["rows"], "calibration.rows");
  if (!rows.IsSequence()) {
    fail(rows, "calibration.rows: expected a list");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string path = "calibration.rows[" + std::to_string(i) + "]";
    check_keys(rows[i], path, {"distance_m", "tx_power_dbm", "rsrp_dbm"});
    c.distances_m.push_back(require(rows[i], rows[i]["distance_m"], path + ".distance_m").as<double>());
    c.tx_power_dbm.push_back(require(rows[i], rows[i]["tx_power_dbm"], path + ".tx_power_dbm").as<double>());
    c.rsrp_dbm.push_back(require(rows[i], rows[i]["rsrp_dbm"], path + ".rsrp_dbm").as<double>());
  }
}

Scenario from_yaml(const YAML::Node& root) {
  check_keys(root, "scenario",
             {"schema_version", "name", "description", "kind", "seed", "duration_ms", "area", "channel", "enb",
              "ue_power", "victim", "ues", "repeater", "sniffers", "points", "attacker", "attacks", "schedule",
              "localization", "calibration", "crowd", "repeater_test", "boost_race"});
  Scenario s;
  const YAML::Node version = require(root, root["schema_version"], "schema_version");
  read(root, "schema_version", "scenario", s.schema_version);
  if (s.schema_version != kSchemaVersion) {
    fail(version, "unsupported schema_version " + std::to_string(s.schema_version));
  }
  s.name = require(root, root["name"], "name").as<std::string>();
  read(root, "description", "scenario", s.description);
  const YAML::Node kind = require(root, root["kind"], "kind");
  const auto k = kind_from_string(kind.as<std::string>());
  if (!k) {
    fail(kind, "unknown kind '" + kind.as<std::string>() + "'");
  }
  s.kind = *k;
  read(root, "seed", "scenario", s.seed);
  read(root, "duration_ms", "scenario", s.duration_ms);

  if (const YAML::Node a = root["area"]) {
    check_keys(a, "area", {"width_m", "height_m", "margin_m"});
    read(a, "width_m", "area", s.area_width_m);
    read(a, "height_m", "area", s.area_height_m);
    read(a, "margin_m", "area", s.area_margin_m);
  }
  if (const YAML::Node c = root["channel"]) {
    parse_channel(c, s.channel);
  }
  const bool world = s.kind != Kind::Calibration && s.kind != Kind::AcquisitionCrowd;
  if (const YAML::Node e = root["enb"]) {
    parse_enb(e, s.enb);
  } else if (world) {
    fail(root, "missing required section 'enb'");
  }
  if (const YAML::Node u = root["ue_power"]) {
    check_keys(u, "ue_power", {"p0_dbm", "alpha"});
    read(u, "p0_dbm", "ue_power", s.ue_power.p0_dbm);
    read(u, "alpha", "ue_power", s.ue_power.alpha);
  }
  if (const YAML::Node v = root["victim"]) {
    check_keys(v, "victim", {"id", "traffic"});
    read(v, "id", "victim", s.victim_id);
    if (v["traffic"]) {
      s.victim_traffic = parse_traffic(v["traffic"], "victim.traffic");
    }
  }
  if (const YAML::Node us = root["ues"]) {
    if (!us.IsSequence()) {
      fail(us, "ues: expected a list");
    }
    for (std::size_t i = 0; i < us.size(); ++i) {
      const std::string path = "ues[" + std::to_string(i) + "]";
      check_keys(us[i], path, {"id", "position", "traffic"});
      UeSpec u;
      u.id = require(us[i], us[i]["id"], path + ".id").as<std::string>();
      u.position = read_position(require(us[i], us[i]["position"], path + ".position"), path + ".position");
      if (us[i]["traffic"]) {
        u.traffic = parse_traffic(us[i]["traffic"], path + ".traffic");
      }
      s.ues.push_back(u);
    }
  }
  if (const YAML::Node r = root["repeater"]) {
    check_keys(r, "repeater", {"id", "internal_antenna", "external_antenna", "sensitivity_dbm", "output_power_dbm"});
    channel::RepeaterModel m;
    read(r, "id", "repeater", m.id);
    m.internal_antenna = read_position(require(r, r["internal_antenna"], "repeater.internal_antenna"), "repeater");
    m.external_antenna = read_position(require(r, r["external_antenna"], "repeater.external_antenna"), "repeater");
    read(r, "sensitivity_dbm", "repeater", m.sensitivity_dbm);
    read(r, "output_power_dbm", "repeater", m.output_power_dbm);
    s.repeater = m;
  }
  if (const YAML::Node sn = root["sniffers"]) {
    if (!sn.IsSequence()) {
      fail(sn, "sniffers: expected a list");
    }
    for (std::size_t i = 0; i < sn.size(); ++i) {
      SnifferSpec spec;
      parse_sniffer(sn[i], spec, i);
      s.sniffers.push_back(spec);
    }
  }
  if (const YAML::Node p = root["points"]) {
    parse_points(p, s.points);
  }
  if (const YAML::Node a = root["attacker"]) {
    parse_attacker(a, s.attacker);
  }
  if (const YAML::Node a = root["attacks"]) {
    check_keys(a, "attacks", {"sched_manip", "power_boost"});
    read(a, "sched_manip", "attacks", s.sched_manip);
    read(a, "power_boost", "attacks", s.power_boost);
  }
  if (const YAML::Node sc = root["schedule"]) {
    check_keys(sc, "schedule", {"acquisition_start_ms", "sched_manip_timeout_ms", "boost_settle_ms", "hold_ms"});
    read(sc, "acquisition_start_ms", "schedule", s.schedule.acquisition_start_ms);
    read(sc, "sched_manip_timeout_ms", "schedule", s.schedule.sched_manip_timeout_ms);
    read(sc, "boost_settle_ms", "schedule", s.schedule.boost_settle_ms);
    read(sc, "hold_ms", "schedule", s.schedule.hold_ms);
  }
  if (const YAML::Node l = root["localization"]) {
    check_keys(l, "localization", {"detection_margin_db", "ambiguity_db", "max_residual_m", "report_sniffer"});
    read(l, "detection_margin_db", "localization", s.bearing.detection_margin_db);
    read(l, "ambiguity_db", "localization", s.bearing.ambiguity_db);
    read(l, "max_residual_m", "localization", s.max_residual_m);
    read(l, "report_sniffer", "localization", s.report_sniffer);
  }
  if (const YAML::Node c = root["calibration"]) {
    parse_calibration(c, s.calibration);
  }
  if (const YAML::Node c = root["crowd"]) {
    check_keys(c, "crowd",
               {"users", "srb_drb1_per_s", "drb2_per_s", "trials", "adversarial_trials", "near_miss_users_per_kind",
                "duration_ms"});
    read(c, "users", "crowd", s.crowd.users);
    read(c, "srb_drb1_per_s", "crowd", s.crowd.srb_drb1_per_s);
    read(c, "drb2_per_s", "crowd", s.crowd.drb2_per_s);
    read(c, "trials", "crowd", s.crowd.trials);
    read(c, "adversarial_trials", "crowd", s.crowd.adversarial_trials);
    read(c, "near_miss_users_per_kind", "crowd", s.crowd.near_miss_users_per_kind);
    read(c, "duration_ms", "crowd", s.crowd.duration_ms);
  }
  if (const YAML::Node r = root["repeater_test"]) {
    check_keys(r, "repeater_test", {"measure_samples", "delta_threshold_db"});
    read(r, "measure_samples", "repeater_test", s.repeater_test.measure_samples);
    read(r, "delta_threshold_db", "repeater_test", s.repeater_test.delta_threshold_db);
  }
  if (const YAML::Node b = root["boost_race"]) {
    check_keys(b, "boost_race", {"steady_band_db", "bin_ms", "deadline_ms"});
    read(b, "steady_band_db", "boost_race", s.boost_race.steady_band_db);
    read(b, "bin_ms", "boost_race", s.boost_race.bin_ms);
    read(b, "deadline_ms", "boost_race", s.boost_race.deadline_ms);
  }

  // The attacker follows the cell's public timing and grant size.
  s.attacker.config.k_grant = s.enb.config.k_grant;
  s.attacker.config.rb_bytes = s.enb.config.rb_bytes;
  if (!s.sniffers.empty()) {
    s.bearing.beamwidth_deg = s.sniffers.front().sweep.antenna.beamwidth_3db_deg;
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || !root.IsMap()) {
    throw ConfigError("scenario document must be a mapping");
  }
  Scenario s;
  try {
    s = from_yaml(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  s.validate();
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open scenario file " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string resolve_scenario_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path)) {
    return name_or_path;
  }
  for (const std::string& cand : {std::string(ULSIM_SCENARIO_DIR) + "/" + name_or_path,
                                  std::string(ULSIM_SCENARIO_DIR) + "/" + name_or_path + ".scn"}) {
    if (fs::exists(cand)) {
      return cand;
    }
  }
  return name_or_path;
}

std::vector<std::string> bundled_scenarios() {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  if (!fs::is_directory(ULSIM_SCENARIO_DIR)) {
    return out;
  }
  for (const auto& e : fs::directory_iterator(ULSIM_SCENARIO_DIR)) {
    if (e.path().extension() == ".scn") {
      out.push_back(e.path().stem().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ulsim::scenario
