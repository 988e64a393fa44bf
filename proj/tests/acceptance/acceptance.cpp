// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ulsim/channel/channel_model.hpp"
#include "ulsim/core/geometry.hpp"
#include "ulsim/core/rng.hpp"
#include "ulsim/enb/anomaly.hpp"
#include "ulsim/localizer/statistics.hpp"
#include "ulsim/phy/dci0.hpp"
#include "ulsim/phy/scheduling_request.hpp"
#include "ulsim/scenario/csv.hpp"
#include "ulsim/scenario/parser.hpp"
#include "ulsim/scenario/runner.hpp"
#include "ulsim/scenario/world.hpp"
#include "ulsim/ue/power_control.hpp"
#include "ulsim/ue/ue.hpp"

using namespace ulsim;
using namespace ulsim::scenario;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t last) {
  std::vector<std::uint64_t> v(last - first + 1);
  std::iota(v.begin(), v.end(), first);
  return v;
}

Scenario bundled(const std::string& name) { return load_scenario_file(resolve_scenario_path(name)); }

RunOptions quiet() {
  RunOptions o;
  o.record_events = false;
  return o;
}

std::string fmt(double v, int decimals = 3) { return format_fixed(v, decimals); }

// 1
void tpc_table(Outcome& o) {
  const std::vector<double> expect{-1.0, 0.0, 1.0, 3.0};
  for (int c = 0; c < 4; ++c) {
    const double want = expect[static_cast<std::size_t>(c)];
    o.require(ue::tpc_delta(c) == want, "tpc_delta(" + std::to_string(c) + ")");
    o.require(phy::tpc_accumulated_delta_db(c) == want, "codec delta " + std::to_string(c));
  }
  o.detail << "(0,1,2,3) -> (-1,0,+1,+3) dB";
}

// 2
void power_clamp(Outcome& o) {
  // Isolated UE over a range of path losses.
  int unit_checks = 0;
  for (double pl = 30.0; pl <= 120.0; pl += 2.5) {
    ue::UeState u;
    u.rnti = 100;
    u.path_loss_db = pl;
    const double base = ue::pusch_tx_power(u, 1);
    for (int n = 1; n <= 30; ++n) {
      phy::Dci0 d;
      d.rnti = 100;
      d.rb = {0, 1};
      d.tpc_command = 3;
      ue::on_dci0(u, d, SimTime::from_ms(10 * n));
      o.require(ue::pusch_tx_power(u, 1) == std::min(ue::kPcmaxDbm, base + 3.0 * n), "unit clamp");
      ++unit_checks;
    }
  }

  // Whole cell with eNB TPC off: every victim PUSCH against the number of
  // forged +3 commands it had received.
  Scenario s = bundled("boost_race");
  s.enb.config.tpc.enabled = false;
  EventLog log;
  World w(s, s.points.front(), s.seed, &log);
  w.core_delivery(SimTime::from_ms(100), kVictimIdentity, channel::Bearer::Srb);
  while (!w.victim().rnti && w.now().ms() < 2000 && w.step()) {
  }
  o.require(w.victim().rnti.has_value(), "victim connected");
  if (!w.victim().rnti) {
    return;
  }
  attack::Attacker& a = w.attacker();
  a.set_target(*w.victim().rnti);
  a.capture_config();
  a.forge();
  a.enable_sched_manip(true);
  a.enable_boost(true);
  const std::int64_t end = w.now().ms() + 20000;
  while (w.now().ms() < end && w.step()) {
  }

  const double pl = channel::path_loss_db(s.channel, distance(w.victim_position(), s.enb.position));
  ue::PowerControlState base_state = s.ue_power;
  base_state.f_db = 0.0;
  int n = 0;
  std::size_t k = 0;
  int checked = 0;
  int saturated = 0;
  double worst = 0.0;
  const auto& tx = w.victim_pusch();
  for (const Event& e : log.events()) {
    if (e.entity != s.victim_id) {
      continue;
    }
    if (e.event == "dci0_rx" && e.extra == "injected") {
      ++n;
    } else if (e.event == "rrc_setup") {
      n = 0;
    } else if (e.event == "pusch_tx") {
      if (k >= tx.size()) {
        o.require(false, "log and PUSCH record disagree");
        return;
      }
      const auto rb_pos = e.extra.find("rb=");
      const int rb = rb_pos == std::string::npos ? 1 : std::stoi(e.extra.substr(rb_pos + 3));
      const double base = ue::compute_tx_power(base_state, pl, rb);
      const double want = std::min(ue::kPcmaxDbm, base + 3.0 * n);
      worst = std::max(worst, std::fabs(tx[k].tx_dbm - want));
      saturated += tx[k].tx_dbm == ue::kPcmaxDbm ? 1 : 0;
      ++checked;
      ++k;
    }
  }
  o.require(checked > 100, "enough victim PUSCH");
  o.require(worst <= 1e-9, "cell-level clamp");
  o.require(saturated > 0, "reached 23 dBm");
  o.detail << unit_checks << " unit steps; cell: " << checked << " PUSCH, " << n << " forged +3, " << saturated
           << " at 23 dBm, max |err| " << worst << " dB";
}

// 3
void boost_race(Outcome& o) {
  const Scenario s = bundled("boost_race");
  const auto seeds = seed_range(1, 10);
  const BatchResult b = run_batch(s, seeds, quiet());
  double worst_settle = 0.0;
  double min_in_band = 1.0;
  int ok = 0;
  for (const RunResult& r : b.runs) {
    const PointResult& p = r.points.front();
    ok += p.success ? 1 : 0;
    worst_settle = std::max(worst_settle, p.extra.at("settle_ms"));
    min_in_band = std::min(min_in_band, p.extra.at("steady_in_band_fraction"));
  }
  o.require(ok == static_cast<int>(seeds.size()), "steady state in every seed");
  o.require(worst_settle <= static_cast<double>(s.boost_race.deadline_ms), "settle within 2 min");
  o.detail << ok << "/" << seeds.size() << " seeds settled, worst settle " << worst_settle / 1000.0
           << " s, min in-band PUSCH fraction " << fmt(min_in_band);
}

// 4
void calibration(Outcome& o) {
  const Scenario s = bundled("table1_power_vs_distance");
  const RunResult r = run_scenario(s, quiet());
  o.require(r.points.size() == 6, "six distances");
  double worst_rsrp = 0.0;
  double worst_tx = 0.0;
  for (const PointResult& p : r.points) {
    worst_rsrp = std::max(worst_rsrp, std::fabs(p.extra.at("rsrp_residual_db")));
    worst_tx = std::max(worst_tx, std::fabs(p.extra.at("tx_residual_db")));
  }
  o.require(worst_rsrp <= s.calibration.rsrp_tolerance_db, "RSRP residual");
  o.require(worst_tx <= s.calibration.tx_tolerance_db, "Tx residual");
  const auto& x = r.points.front().extra;
  o.detail << "pl0 " << fmt(x.at("pl0_db")) << " dB, n " << fmt(x.at("exponent_n")) << ", p0 " << fmt(x.at("p0_dbm"))
           << " dBm, alpha " << fmt(x.at("alpha")) << "; max |RSRP res| " << fmt(worst_rsrp) << " dB, max |Tx res| "
           << fmt(worst_tx) << " dB";
}

// 5
void shadow_area(Outcome& o) {
  const Scenario s = bundled("shadow_area");
  const auto seeds = seed_range(1, 5);
  for (bool boost : {true, false}) {
    RunOptions opt = quiet();
    opt.power_boost = boost;
    const BatchResult b = run_batch(s, seeds, opt);
    int near_ok = 0;
    int far_ok = 0;
    for (const RunResult& r : b.runs) {
      near_ok += r.find("near10")->success ? 1 : 0;
      far_ok += r.find("far90")->success ? 1 : 0;
    }
    const int n = static_cast<int>(seeds.size());
    if (boost) {
      o.require(near_ok == n && far_ok == n, "boosted: both detectable");
    } else {
      o.require(near_ok == 0 && far_ok == n, "unboosted: far only");
    }
    o.detail << (boost ? "boosted" : "; unboosted") << " near10 " << near_ok << "/" << n << ", far90 " << far_ok << "/"
             << n;
  }
}

// 6
void repeater(Outcome& o) {
  const Scenario s = bundled("repeater_table5");
  const auto seeds = seed_range(1, 100);
  const BatchResult b = run_batch(s, seeds, quiet());
  int selected = 0;
  double rep_max = 0.0;
  double ue_min = 1e9;
  for (const RunResult& r : b.runs) {
    const PointResult& p = r.points.front();
    const auto sel = p.extra.find("selected_ue");
    selected += sel != p.extra.end() && sel->second == 1.0 ? 1 : 0;
    if (p.extra.count("repeater_delta_db") != 0) {
      rep_max = std::max(rep_max, std::fabs(p.extra.at("repeater_delta_db")));
      ue_min = std::min(ue_min, p.extra.at("ue_delta_db"));
    } else {
      ue_min = -1e9;
    }
  }
  o.require(rep_max < 0.5, "repeater delta < 0.5 dB");
  o.require(ue_min >= 15.0, "UE delta >= 15 dB");
  o.require(selected == 100, "UE selected in every run");
  o.detail << "UE selected " << selected << "/100, max |repeater delta| " << fmt(rep_max) << " dB, min UE delta "
           << fmt(ue_min) << " dB";
}

// 7
void sched_manip(Outcome& o) {
  const Scenario s = bundled("sched_manip_unit");
  const auto seeds = seed_range(1, 10);
  const BatchResult on = run_batch(s, seeds, quiet());
  int min_steps = 1 << 30;
  int changes = 0;
  double min_pad = 1.0;
  double min_compliance = 1.0;
  double max_excess = -1e9;
  double max_ratio = 0.0;
  for (const RunResult& r : on.runs) {
    const auto& x = r.points.front().extra;
    min_steps = std::min(min_steps, static_cast<int>(x.at("steps_ok")));
    changes += static_cast<int>(x.at("rnti_changes"));
    min_pad = std::min(min_pad, x.at("padding_zero_bsr_fraction"));
    min_compliance = std::min(min_compliance, x.at("grant_compliance"));
    max_excess = std::max(max_excess, x.at("duty_excess"));
    max_ratio = std::max(max_ratio, x.at("duty_ratio"));
    o.require(r.points.front().phases.sched_manip_ms >= s.schedule.hold_ms, "held for the full minute");
  }
  o.require(min_steps >= 4, "at least 4 manipulation steps");
  o.require(min_pad == 1.0 && min_compliance == 1.0, "padding + zero BSR on every granted subframe");
  o.require(changes == 0, "RNTI unchanged for 60 s");
  o.require(max_excess <= 1.0, "duty <= 10% + rounding");

  RunOptions off = quiet();
  off.sched_manip = false;
  const BatchResult idle = run_batch(s, seeds, off);
  int exact = 0;
  for (const RunResult& r : idle.runs) {
    exact += r.points.front().extra.at("expired_idle_ms") == static_cast<double>(s.enb.config.inactivity_timeout_ms);
  }
  o.require(exact == static_cast<int>(seeds.size()), "idle expiry at exactly 15 s");
  o.detail << seeds.size() << " seeds: min steps " << min_steps << ", padding/zero-BSR fraction " << fmt(min_pad)
           << ", RNTI changes " << changes << ", max duty ratio " << fmt(max_ratio) << " (excess " << fmt(max_excess)
           << " subframes); attack off: expiry at 15000 ms in " << exact << "/" << seeds.size();
}

// 8
void crowd(Outcome& o) {
  const Scenario s = bundled("rnti_acquisition_crowd");
  const RunResult r = run_scenario(s, quiet());
  int normal = 0;
  int normal_ok = 0;
  int adversarial = 0;
  int fp = 0;
  int adversarial_ok = 0;
  double min_users = 1e9;
  for (const PointResult& p : r.points) {
    min_users = std::min(min_users, p.extra.at("users"));
    if (p.extra.at("adversarial") == 0.0) {
      ++normal;
      normal_ok += p.extra.at("identified") == 1.0 && p.extra.at("matches") == 1.0 ? 1 : 0;
    } else {
      ++adversarial;
      fp += p.extra.at("false_positive") == 1.0 ? 1 : 0;
      adversarial_ok += p.success ? 1 : 0;
    }
  }
  o.require(min_users >= 200, ">= 200 background users");
  o.require(normal == s.crowd.trials && normal_ok == normal, "unique identification in every trial");
  o.require(adversarial == s.crowd.adversarial_trials && fp == 0, "no false positives");
  o.detail << "identified " << normal_ok << "/" << normal << ", adversarial false positives " << fp << "/" << adversarial
           << " (correct outcome " << adversarial_ok << "/" << adversarial << "), users " << min_users;
}

bool near_enb(const Scenario& s, const std::string& label) {
  for (const PointSpec& p : s.points) {
    if (p.label == label) {
      return distance(p.victim, s.enb.position) <= 5.0;
    }
  }
  return false;
}

// 9
void end_to_end(Outcome& o) {
  const Scenario s = bundled("e2e_lab");
  const auto seeds = seed_range(1, 20);
  RunOptions on = quiet();
  on.power_boost = true;
  RunOptions off = quiet();
  off.power_boost = false;
  const BatchResult b = run_batch(s, seeds, on);
  const BatchResult u = run_batch(s, seeds, off);
  const std::string snr_point = "p3";
  int boosted_full = 0;
  int near_fail = 0;
  int lower = 0;
  std::vector<double> snr_on;
  std::vector<double> snr_off;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const RunResult& rb = b.runs[i];
    const RunResult& ru = u.runs[i];
    boosted_full += rb.all_succeeded() ? 1 : 0;
    lower += ru.successes() < rb.successes() ? 1 : 0;
    bool failed = false;
    for (const PointResult& p : ru.points) {
      failed = failed || (!p.success && near_enb(s, p.label));
    }
    near_fail += failed ? 1 : 0;
    snr_on.push_back(rb.find(snr_point)->snr_db);
    snr_off.push_back(ru.find(snr_point)->snr_db);
  }
  const auto n = static_cast<int>(seeds.size());
  const double on_min = *std::min_element(snr_on.begin(), snr_on.end());
  const double off_max = *std::max_element(snr_off.begin(), snr_off.end());
  o.require(boosted_full == n, "boosted 9/9 in every seed");
  o.require(b.p70.dist_err_m <= 2.5, "boosted p70 <= 2.5 m");
  o.require(lower == n, "unboosted success strictly lower");
  o.require(near_fail == n, "a near-eNB point fails unboosted");
  o.require(u.p70.dist_err_m > b.p70.dist_err_m, "unboosted p70 larger");
  o.require(on_min >= 25.0, "boosted SNR >= 25 dB");
  o.require(off_max <= 18.0, "unboosted SNR <= 18 dB");
  o.detail << n << " seeds: boosted success " << fmt(b.p70.success_fraction) << " (9/9 in " << boosted_full << "), p70 "
           << fmt(b.p70.dist_err_m) << " m; unboosted success " << fmt(u.p70.success_fraction) << ", p70 "
           << fmt(u.p70.dist_err_m) << " m, near-eNB failure in " << near_fail << "; " << snr_point
           << " SNR at sniffer A: boosted min " << fmt(on_min, 1) << " dB, unboosted max " << fmt(off_max, 1) << " dB";
}

// 10
void codec(Outcome& o) {
  std::mt19937_64 g(20240601);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); };
  int dci = 0;
  int sr_count = 0;
  std::size_t longest = 0;
  for (int i = 0; i < 10000; ++i) {
    const int start = pick(0, phy::kDefaultUplinkRbs - 1);
    phy::Dci0 d;
    d.rnti = static_cast<std::uint16_t>(pick(0, 0xFFFF));
    d.rb = {start, pick(1, phy::kDefaultUplinkRbs - start)};
    d.hopping = pick(0, 1) == 1;
    d.ndi = pick(0, 1) == 1;
    d.cqi_request = pick(0, 1) == 1;
    for (std::uint8_t tpc = 0; tpc < 4; ++tpc) {
      d.tpc_command = tpc;
      const phy::BitString bits = phy::encode_dci0(d);
      longest = std::max(longest, bits.size());
      dci += phy::decode_dci0(bits) == d ? 1 : 0;
    }
    phy::SchedulingRequest sr;
    sr.rnti = static_cast<std::uint16_t>(pick(0, 0xFFFF));
    sr.config.pucch_resource_index = static_cast<std::uint16_t>(pick(0, phy::kMaxPucchResourceIndex));
    sr.config.sr_config_index = static_cast<std::uint8_t>(pick(0, phy::kMaxSrConfigIndex));
    sr_count += phy::decode_sr(phy::encode_sr(sr)) == sr ? 1 : 0;
  }
  o.require(dci == 40000, "DCI 0 round trip");
  o.require(sr_count == 10000, "SR round trip");
  o.require(longest <= 37, "DCI 0 <= 37 bits");
  o.detail << "DCI 0 " << dci << "/40000, SR " << sr_count << "/10000, longest DCI 0 " << longest << " bits";
}

std::string all_csv(const RunResult& r) {
  std::ostringstream os;
  write_metrics_csv(os, std::span(&r, 1));
  write_sweep_csv(os, std::span(&r, 1));
  r.events.write_csv(os);
  return os.str();
}

// 11, plus the per-scenario wall time
void determinism(Outcome& o, Outcome& timing) {
  int identical = 0;
  const auto names = bundled_scenarios();
  double slowest = 0.0;
  std::string slowest_name;
  for (const std::string& name : names) {
    const Scenario s = bundled(name);
    RunOptions opt;
    opt.threads = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string a = all_csv(run_scenario(s, opt));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string b = all_csv(run_scenario(s, opt));
    if (a == b) {
      ++identical;
    } else {
      o.require(false, name + " differs");
    }
    timing.require(secs < 10.0, name + " took " + fmt(secs, 1) + " s");
    if (secs >= slowest) {
      slowest = secs;
      slowest_name = name;
    }
  }
  o.require(names.size() >= 7, "all bundled scenarios present");
  o.detail << identical << "/" << names.size() << " scenarios byte-identical on re-run (metrics, sweep, events)";
  timing.detail << "slowest scenario " << slowest_name << " " << fmt(slowest, 2) << " s single-threaded";
}

// Background traffic for the benign set: victim and three other UEs with
// random uplink and downlink load, 20 s each.
ue::TrafficProfile benign_traffic(Rng& r) {
  ue::TrafficProfile t;
  t.uplink_packets_per_s = r.uniform(0.2, 50.0);
  t.uplink_packet_bytes = static_cast<std::uint32_t>(r.uniform_int(20, 1500));
  t.drb1_per_s = r.uniform(0.0, 2.0);
  t.drb2_per_s = r.uniform(0.0, 2.0);
  return t;
}

// 12
void anomalies(Outcome& o) {
  const Scenario sm = bundled("sched_manip_unit");
  const auto seeds = seed_range(1, 10);
  const BatchResult on = run_batch(sm, seeds, quiet());
  int attacked = 0;
  int flagged = 0;
  for (const RunResult& r : on.runs) {
    ++attacked;
    flagged += r.points.front().anomalies.any() ? 1 : 0;
  }
  const Scenario lab = bundled("e2e_lab");
  const RunResult e2e = run_scenario(lab, quiet());
  for (const PointResult& p : e2e.points) {
    ++attacked;
    flagged += p.anomalies.any() ? 1 : 0;
  }
  o.require(flagged == attacked, "every manipulated run flagged");

  int benign_flagged = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Scenario s = lab;
    Rng r = seeded_rng(i, "benign");
    s.victim_traffic = benign_traffic(r);
    s.ues.clear();
    for (int k = 0; k < 3; ++k) {
      UeSpec u;
      u.id = "ue" + std::to_string(k);
      u.position = {r.uniform(0.0, lab.area_width_m), r.uniform(0.0, lab.area_height_m)};
      u.traffic = benign_traffic(r);
      s.ues.push_back(u);
    }
    World w(s, s.points[i % s.points.size()], i, nullptr);
    while (w.now().ms() < 20000 && w.step()) {
    }
    std::vector<enb::ReceivedPdu> v;
    for (const VictimPusch& p : w.victim_pusch()) {
      v.push_back({p.at, p.pdu});
    }
    benign_flagged += enb::detect_anomalies(v).any() || w.enb().anomalies().flags().any() ? 1 : 0;
  }
  o.require(benign_flagged == 0, "no benign run flagged");
  o.detail << "manipulated runs flagged " << flagged << "/" << attacked << ", benign runs flagged " << benign_flagged
           << "/100";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  Outcome timing;
  const std::vector<Criterion> criteria{
      {1, "tpc_table", tpc_table},
      {2, "power_clamp", power_clamp},
      {3, "boost_race", boost_race},
      {4, "calibration", calibration},
      {5, "shadow_area", shadow_area},
      {6, "repeater", repeater},
      {7, "sched_manip", sched_manip},
      {8, "rnti_acquisition", crowd},
      {9, "end_to_end", end_to_end},
      {10, "codec", codec},
      {11, "determinism", [&](Outcome& o) { determinism(o, timing); }},
      {12, "anomaly_detection", anomalies},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  failed += timing.pass ? 0 : 1;
  std::printf("%s    runtime: %s\n", timing.pass ? "PASS" : "FAIL", timing.detail.str().c_str());
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
