#include "ulsim/scenario/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ulsim/attacker/repeater_disambiguation.hpp"
#include "ulsim/channel/calibration.hpp"
#include "ulsim/core/errors.hpp"
#include "ulsim/localizer/multiangulation.hpp"
#include "ulsim/localizer/statistics.hpp"
#include "ulsim/scenario/crowd.hpp"
#include "ulsim/scenario/world.hpp"
#include "ulsim/ue/power_control.hpp"

namespace ulsim::scenario {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) {
            err = std::current_exception();
          }
        }
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (err) {
    std::rethrow_exception(err);
  }
}

double max_finite(std::span<const double> v) {
  double m = kNaN;
  for (double x : v) {
    if (std::isfinite(x) && !(x <= m)) {
      m = x;
    }
  }
  return m;
}

struct Flags {
  bool boost = true;
  bool sched = true;
};

/// Attack sequence on one world: acquisition, scheduling manipulation,
/// power boosting, then whatever the experiment measures.
class Campaign {
 public:
  Campaign(World& w, PointResult& r, Flags f) : w_(w), s_(w.scenario()), r_(r), f_(f) {}

  template <typename Pred>
  bool run_until(Pred done) {
    while (!done()) {
      if (!w_.step()) {
        return false;
      }
    }
    return true;
  }

  bool run_for(std::int64_t ms) {
    const std::int64_t end = w_.now().ms() + ms;
    return run_until([&] { return w_.now().ms() >= end; });
  }

  /// Silent messages to the victim, then RNTI acquisition and forging.
  bool acquire() {
    const attack::SilentPattern& pat = s_.attacker.config.pattern;
    const std::int64_t start = s_.schedule.acquisition_start_ms;
    attack::Attacker& a = w_.attacker();
    // An ambiguous match is retried with one more silent message.
    for (int extra = 0;; ++extra) {
      const int bursts = pat.burst_count + extra;
      for (int i = extra == 0 ? 0 : bursts - 1; i < bursts; ++i) {
        w_.core_delivery(SimTime::from_ms(start + i * pat.gap_ms), kVictimIdentity, channel::Bearer::Srb);
      }
      const std::int64_t decide = start + (bursts - 1) * pat.gap_ms + s_.attacker.config.burst_merge_ms;
      const bool reached = run_until([&] { return w_.now().ms() >= decide; });
      r_.phases.acquisition_ms = w_.now().ms();
      mark_ = w_.now().ms();
      if (!reached) {
        return fail("acquisition: run ended before the pattern completed");
      }
      r_.extra["silent_messages"] = bursts;
      try {
        a.acquire(SimTime::from_ms(start), w_.now(), extra);
        break;
      } catch (const AmbiguousError& e) {
        if (extra >= kMaxExtraBursts) {
          return fail(std::string("acquisition: ") + e.what());
        }
      } catch (const Error& e) {
        return fail(std::string("acquisition: ") + e.what());
      }
    }
    try {
      a.capture_config();
      a.forge();
    } catch (const Error& e) {
      return fail(std::string("acquisition: ") + e.what());
    }
    const auto* rec = w_.enb().find(*w_.attacker().state().target_rnti);
    r_.extra["rnti_correct"] = rec != nullptr && rec->ue_identity == kVictimIdentity ? 1.0 : 0.0;
    return true;
  }

  /// Waits for the first confirmed manipulation step, up to the timeout.
  void start_sched_manip() {
    w_.attacker().enable_sched_manip(f_.sched);
    if (f_.sched) {
      const std::int64_t deadline = w_.now().ms() + s_.schedule.sched_manip_timeout_ms;
      run_until([&] { return w_.attacker().steps_ok() >= 1 || w_.now().ms() >= deadline; });
      if (w_.attacker().steps_ok() < 1) {
        note_failure("sched_manip: no manipulation step confirmed");
      }
    }
    close_phase(r_.phases.sched_manip_ms);
  }

  /// Runs `settle_ms` with or without boosting, so both sweeps see the
  /// victim's steady power.
  void start_boost(std::int64_t settle_ms) {
    w_.attacker().enable_boost(f_.boost);
    if (f_.boost) {
      boost_start_ = w_.now().ms();
    }
    run_for(settle_ms);
    close_phase(r_.phases.boost_ms);
  }

  bool sweep() {
    w_.start_sweeps();
    const bool ok = run_until([&] { return w_.sweeps_done(); });
    close_phase(r_.phases.sweep_ms);
    return ok;
  }

  void close_phase(std::int64_t& slot) {
    slot += w_.now().ms() - mark_;
    mark_ = w_.now().ms();
  }

  void finish() { r_.phases.total_ms = w_.now().ms(); }

  bool fail(std::string why) {
    note_failure(std::move(why));
    return false;
  }

  void note_failure(std::string why) {
    if (r_.failure.empty()) {
      r_.failure = std::move(why);
    }
  }

  std::int64_t boost_start() const { return boost_start_; }

 private:
  World& w_;
  const Scenario& s_;
  PointResult& r_;
  Flags f_;
  std::int64_t mark_ = 0;
  std::int64_t boost_start_ = -1;
};

loc::BearingMeasurement measure(const loc::SweepProfile& p, const loc::BearingOptions& opt) {
  try {
    return loc::estimate_bearing(p, opt);
  } catch (const EmptyProfileError&) {
    loc::BearingMeasurement m;
    m.sniffer = p.sniffer;
    m.peak_dbm = kNaN;
    m.snr_db = kNaN;
    return m;
  }
}

std::size_t report_index(const Scenario& s) {
  for (std::size_t i = 0; i < s.sniffers.size(); ++i) {
    if (s.sniffers[i].id == s.report_sniffer) {
      return i;
    }
  }
  return 0;
}

void collect_bearings(World& w, PointResult& r) {
  const Scenario& s = w.scenario();
  std::vector<double> peaks;
  for (std::size_t i = 0; i < w.sniffer_count(); ++i) {
    loc::SweepProfile p = w.sweep_profile(i);
    const loc::BearingMeasurement m = measure(p, s.bearing);
    const double truth = bearing_deg(w.sniffer_position(i), w.victim_position());
    r.bearing_err_deg.push_back(m.bearing_deg ? std::fabs(wrap_180(*m.bearing_deg - truth)) : kInf);
    r.bearings.push_back(m);
    peaks.push_back(max_finite(p.mean_dbm));
    r.profiles.push_back({w.sniffer_id(i), std::move(p)});
  }
  r.max_dbm = max_finite(peaks);
  const std::size_t rep = report_index(s);
  r.snr_db = rep < r.bearings.size() ? r.bearings[rep].snr_db : kNaN;
  r.extra["report_quality"] = rep < r.bearings.size() ? static_cast<double>(r.bearings[rep].quality) : 0.0;
}

void localize(World& w, PointResult& r) {
  const Scenario& s = w.scenario();
  r.dist_err_m = kInf;
  const bool all_ok = !r.bearings.empty() && std::all_of(r.bearings.begin(), r.bearings.end(), [](const auto& b) {
    return b.quality == loc::BearingQuality::Ok;
  });
  if (!all_ok) {
    if (r.failure.empty()) {
      r.failure = "localization: bearing not resolved";
    }
    return;
  }
  loc::LocationEstimate est;
  try {
    est = loc::multiangulate(r.bearings);
  } catch (const Error& e) {
    r.failure = std::string("localization: ") + e.what();
    return;
  }
  r.estimate = est.position;
  r.extra["residual_m"] = est.residual_m;
  const double m = s.area_margin_m;
  const bool inside = est.position.x >= -m && est.position.x <= s.area_width_m + m && est.position.y >= -m &&
                      est.position.y <= s.area_height_m + m;
  r.extra["inside_area"] = inside ? 1.0 : 0.0;
  if (est.residual_m > s.max_residual_m) {
    r.failure = "localization: rays do not meet";
    return;
  }
  r.dist_err_m = loc::localization_error(est, w.victim_position());
  r.success = true;
}

void anomaly_flags(World& w, PointResult& r) {
  const auto& target = w.attacker().state().target_rnti;
  if (target) {
    r.anomalies = w.enb().anomalies().flags_for(*target);
  }
}

// ---------------------------------------------------------------------------

void run_localization(World& w, PointResult& r, Flags f) {
  const Scenario& s = w.scenario();
  Campaign c(w, r, f);
  if (c.acquire()) {
    c.start_sched_manip();
    c.start_boost(s.schedule.boost_settle_ms);
    if (!c.sweep()) {
      c.note_failure("sweep: run ended before the sweep completed");
    }
    collect_bearings(w, r);
  }
  c.finish();
  if (s.kind == Kind::Localization && !r.bearings.empty()) {
    localize(w, r);
  } else if (s.kind == Kind::ShadowArea && !r.bearings.empty()) {
    r.dist_err_m = kNaN;
    r.success = r.bearings[report_index(s)].quality != loc::BearingQuality::Undetectable;
  } else {
    r.dist_err_m = kInf;
  }
  anomaly_flags(w, r);
}

void run_sched_manip(World& w, PointResult& r, Flags f) {
  const Scenario& s = w.scenario();
  const enb::EnbConfig& cfg = s.enb.config;
  Campaign c(w, r, f);
  r.dist_err_m = kNaN;
  r.max_dbm = kNaN;
  r.snr_db = kNaN;
  if (!c.acquire()) {
    c.finish();
    return;
  }
  const std::uint16_t rnti = *w.attacker().state().target_rnti;
  const std::int64_t hold_start = w.now().ms();
  w.attacker().enable_sched_manip(f.sched);
  int rnti_changes = 0;
  std::optional<std::uint16_t> current = w.victim().rnti;
  std::int64_t expired_at = -1;
  const std::int64_t end = hold_start + s.schedule.hold_ms;
  while (w.now().ms() < end && w.step()) {
    if (w.victim().rnti != current) {
      ++rnti_changes;
      current = w.victim().rnti;
    }
    const enb::RntiRecord* rec = w.enb().find(rnti);
    if (expired_at < 0 && rec != nullptr && rec->state == enb::RntiState::Expired) {
      expired_at = w.now().ms() - 1;
    }
  }
  c.close_phase(r.phases.sched_manip_ms);
  c.finish();

  // Victim behaviour on every legitimate grant scheduled during the hold.
  std::map<std::int64_t, const VictimPusch*> tx;
  for (const VictimPusch& p : w.victim_pusch()) {
    tx[p.at.ms()] = &p;
  }
  int grants = 0;
  int answered = 0;
  int padding_zero = 0;
  for (const enb::UplinkGrant& g : w.enb().issued_log()) {
    if (g.rnti != rnti || g.issued.ms() < hold_start || g.scheduled.ms() >= w.now().ms()) {
      continue;
    }
    ++grants;
    auto it = tx.find(g.scheduled.ms());
    if (it == tx.end()) {
      continue;
    }
    ++answered;
    const phy::MacPdu& pdu = it->second->pdu;
    if (pdu.kind == phy::PayloadKind::Padding && pdu.bsr && pdu.bsr->buffer_size_bytes == 0) {
      ++padding_zero;
    }
  }
  const attack::Attacker& a = w.attacker();
  r.extra["steps_ok"] = a.steps_ok();
  r.extra["steps_lost"] = a.steps_lost();
  r.extra["worst_duty_excess"] = a.worst_duty_excess();
  r.extra["duty_excess"] = a.duty_excess();
  r.extra["rnti_changes"] = rnti_changes;
  r.extra["victim_grants"] = grants;
  r.extra["grant_compliance"] = grants > 0 ? static_cast<double>(answered) / grants : 0.0;
  r.extra["padding_zero_bsr_fraction"] = grants > 0 ? static_cast<double>(padding_zero) / grants : 0.0;
  int injected = 0;
  int granted = 0;
  for (const attack::DutyWindow& d : a.duty_windows()) {
    injected += d.used;
    granted += d.granted;
  }
  r.extra["injected_subframes"] = injected;
  r.extra["victim_granted_subframes"] = granted;
  r.extra["duty_ratio"] = a.duty_ratio();
  anomaly_flags(w, r);
  r.extra["anomaly_flagged"] = r.anomalies.any() ? 1.0 : 0.0;
  if (f.sched) {
    r.success = a.steps_ok() >= 4 && rnti_changes == 0 && expired_at < 0 && grants > 0 &&
                padding_zero == grants && a.duty_excess() <= 1.0;
  } else {
    const enb::RntiRecord* rec = w.enb().find(rnti);
    const std::int64_t idle = expired_at >= 0 && rec != nullptr ? expired_at - rec->last_activity.ms() : -1;
    r.extra["expired_idle_ms"] = static_cast<double>(idle);
    r.success = idle == cfg.inactivity_timeout_ms;
  }
  if (!r.success && r.failure.empty()) {
    r.failure = "sched_manip: criteria not met";
  }
}

void run_boost_race(World& w, PointResult& r, Flags f) {
  const Scenario& s = w.scenario();
  Campaign c(w, r, f);
  r.dist_err_m = kNaN;
  r.snr_db = kNaN;
  r.max_dbm = kNaN;
  if (!c.acquire()) {
    c.finish();
    return;
  }
  c.start_sched_manip();
  const std::int64_t phase_start = w.now().ms();
  c.start_boost(s.schedule.hold_ms);
  c.finish();
  const BoostRaceSpec& br = s.boost_race;
  const std::int64_t start = f.boost ? c.boost_start() : phase_start;
  const double floor_dbm = ue::kPcmaxDbm - br.steady_band_db;
  const std::int64_t bins = (w.now().ms() - start) / br.bin_ms;
  std::vector<std::vector<double>> per_bin(static_cast<std::size_t>(std::max<std::int64_t>(bins, 0)));
  double max_tx = -kInf;
  for (const VictimPusch& p : w.victim_pusch()) {
    const std::int64_t b = (p.at.ms() - start) / br.bin_ms;
    if (p.at.ms() < start || b >= bins) {
      continue;
    }
    max_tx = std::max(max_tx, p.tx_dbm);
    per_bin[static_cast<std::size_t>(b)].push_back(p.tx_dbm);
  }
  // First bin after which no bin's median leaves the band.
  std::int64_t settled_bin = -1;
  for (std::int64_t b = 0; b < bins; ++b) {
    const auto& v = per_bin[static_cast<std::size_t>(b)];
    const bool ok = !v.empty() && loc::median(v) >= floor_dbm;
    if (!ok) {
      settled_bin = -1;
    } else if (settled_bin < 0) {
      settled_bin = b;
    }
  }
  int steady = 0;
  int in_band = 0;
  for (std::int64_t b = std::max<std::int64_t>(settled_bin, 0); settled_bin >= 0 && b < bins; ++b) {
    for (double tx : per_bin[static_cast<std::size_t>(b)]) {
      ++steady;
      in_band += tx >= floor_dbm ? 1 : 0;
    }
  }
  const double settle = settled_bin >= 0 ? static_cast<double>(settled_bin * br.bin_ms) : kInf;
  const std::int64_t observed = settled_bin >= 0 ? bins - settled_bin : 0;
  r.max_dbm = std::isfinite(max_tx) ? max_tx : kNaN;
  r.extra["settle_ms"] = settle;
  r.extra["steady_bins"] = static_cast<double>(observed);
  r.extra["steady_pusch"] = steady;
  r.extra["steady_in_band_fraction"] = steady > 0 ? static_cast<double>(in_band) / steady : 0.0;
  r.extra["boosts_sent"] = w.attacker().boosts_sent();
  // The steady state has to hold at least until the deadline.
  r.success = settle <= static_cast<double>(br.deadline_ms) && observed * br.bin_ms >= br.deadline_ms - settle;
  if (!r.success && r.failure.empty()) {
    r.failure = "boost_race: no steady state";
  }
  anomaly_flags(w, r);
}

class WorldBoostController : public attack::BoostController {
 public:
  WorldBoostController(World& w, Campaign& c, std::size_t sniffer, int samples, std::int64_t settle_ms)
      : w_(w), c_(c), sniffer_(sniffer), samples_(samples), settle_ms_(settle_ms) {}

  void enable_boost() override {
    w_.attacker().enable_boost(true);
    c_.run_for(settle_ms_);
  }

  double measure(double bearing) override {
    w_.start_probe(sniffer_, bearing, samples_);
    if (!c_.run_until([&] { return w_.probe_done(sniffer_); })) {
      throw InconclusiveError("run ended during a probe measurement");
    }
    return w_.probe_mean_dbm(sniffer_);
  }

 private:
  World& w_;
  Campaign& c_;
  std::size_t sniffer_;
  int samples_;
  std::int64_t settle_ms_;
};

void run_repeater(World& w, PointResult& r, Flags f) {
  const Scenario& s = w.scenario();
  Campaign c(w, r, Flags{false, f.sched});
  r.dist_err_m = kNaN;
  if (!c.acquire()) {
    c.finish();
    return;
  }
  c.start_sched_manip();
  c.start_boost(s.schedule.boost_settle_ms);
  if (!c.sweep()) {
    c.note_failure("sweep: run ended before the sweep completed");
  }
  collect_bearings(w, r);
  const std::size_t sn = report_index(s);
  const loc::SweepProfile& prof = r.profiles.at(sn).profile;
  std::vector<double> cand;
  for (std::size_t i : loc::local_maxima(prof)) {
    const double a = prof.angles_deg[i];
    if (cand.empty() || std::fabs(wrap_180(a - cand[0])) > s.bearing.beamwidth_deg) {
      cand.push_back(a);
    }
    if (cand.size() == 2) {
      break;
    }
  }
  if (cand.size() < 2) {
    c.finish();
    r.failure = "repeater: fewer than two separated candidate bearings";
    return;
  }
  const Position sp = w.sniffer_position(sn);
  const double ue_truth = bearing_deg(sp, w.victim_position());
  const double rep_truth = bearing_deg(sp, s.repeater->external_antenna);
  auto off = [](double a, double b) { return std::fabs(wrap_180(a - b)); };
  const std::size_t ue_idx = off(cand[0], ue_truth) <= off(cand[1], ue_truth) ? 0 : 1;
  r.extra["candidate_ue_deg"] = cand[ue_idx];
  r.extra["candidate_repeater_deg"] = cand[1 - ue_idx];
  r.extra["ue_truth_deg"] = ue_truth;
  r.extra["repeater_truth_deg"] = rep_truth;
  WorldBoostController ctl(w, c, sn, s.repeater_test.measure_samples, s.schedule.boost_settle_ms);
  try {
    const attack::DisambiguationResult d =
        attack::disambiguate_repeater(cand, ctl, s.repeater_test.delta_threshold_db);
    r.extra["ue_pre_dbm"] = d.pre_dbm[ue_idx];
    r.extra["ue_post_dbm"] = d.post_dbm[ue_idx];
    r.extra["repeater_pre_dbm"] = d.pre_dbm[1 - ue_idx];
    r.extra["repeater_post_dbm"] = d.post_dbm[1 - ue_idx];
    r.extra["ue_delta_db"] = d.rise_db[ue_idx];
    r.extra["repeater_delta_db"] = d.rise_db[1 - ue_idx];
    r.extra["selected_ue"] = d.index == ue_idx ? 1.0 : 0.0;
    r.success = d.index == ue_idx;
  } catch (const InconclusiveError& e) {
    r.failure = std::string("repeater: ") + e.what();
  }
  c.close_phase(r.phases.sweep_ms);
  c.finish();
  if (!r.success && r.failure.empty()) {
    r.failure = "repeater: selected the repeater direction";
  }
  anomaly_flags(w, r);
}

PointResult run_world_point(const Scenario& s, const PointSpec& point, std::uint64_t seed, Flags f, EventLog* log,
                            const std::string& prefix) {
  World w(s, point, seed, log, prefix);
  PointResult r;
  r.label = point.label;
  switch (s.kind) {
    case Kind::Localization:
    case Kind::ShadowArea:
      run_localization(w, r, f);
      break;
    case Kind::SchedManip:
      run_sched_manip(w, r, f);
      break;
    case Kind::BoostRace:
      run_boost_race(w, r, f);
      break;
    case Kind::Repeater:
      run_repeater(w, r, f);
      break;
    case Kind::Calibration:
    case Kind::AcquisitionCrowd:
      throw ConfigError("scenario kind has no world");
  }
  if (r.bearing_err_deg.empty()) {
    r.bearing_err_deg.assign(2, kNaN);
  }
  if (s.kind == Kind::Localization && !r.success) {
    r.dist_err_m = kInf;
  }
  return r;
}

// ---------------------------------------------------------------------------

void run_calibration(const Scenario& s, RunResult& out) {
  const CalibrationSpec& c = s.calibration;
  const channel::PathLossFit pl = channel::fit_path_loss(c.distances_m, c.rsrp_dbm, c.reference_power_dbm);
  std::vector<double> loss;
  for (double rsrp : c.rsrp_dbm) {
    loss.push_back(c.reference_power_dbm - rsrp);
  }
  const channel::LineFit tx = channel::fit_line(loss, c.tx_power_dbm);
  for (std::size_t i = 0; i < c.distances_m.size(); ++i) {
    PointResult r;
    r.label = "d" + format_fixed(c.distances_m[i], 0);
    const double rsrp_res = pl.rsrp_residuals_db[i];
    const double tx_res = tx.residuals[i];
    r.success = std::fabs(rsrp_res) <= c.rsrp_tolerance_db && std::fabs(tx_res) <= c.tx_tolerance_db;
    r.bearing_err_deg.assign(2, kNaN);
    r.dist_err_m = kNaN;
    r.max_dbm = kNaN;
    r.snr_db = kNaN;
    r.extra["distance_m"] = c.distances_m[i];
    r.extra["rsrp_residual_db"] = rsrp_res;
    r.extra["tx_residual_db"] = tx_res;
    r.extra["pl0_db"] = pl.pl0_db;
    r.extra["exponent_n"] = pl.exponent_n;
    r.extra["p0_dbm"] = tx.intercept;
    r.extra["alpha"] = tx.slope;
    out.events.record(SimTime{}, "calibration", "fit_row", std::nullopt, rsrp_res,
                      "tx_residual=" + format_fixed(tx_res));
    out.points.push_back(std::move(r));
  }
}

void run_crowd(const Scenario& s, RunResult& out, int threads) {
  const int n = s.crowd.trials + s.crowd.adversarial_trials;
  std::vector<CrowdTrial> trials(static_cast<std::size_t>(n));
  parallel_for(trials.size(), threads, [&](std::size_t i) {
    const int idx = static_cast<int>(i);
    const bool adv = idx >= s.crowd.trials;
    trials[i] = run_crowd_trial(s, out.seed, adv ? idx - s.crowd.trials : idx, adv);
  });
  for (const CrowdTrial& t : trials) {
    PointResult r;
    r.label = t.label;
    r.success = t.identified() && !t.false_positive();
    r.bearing_err_deg.assign(2, kNaN);
    r.dist_err_m = kNaN;
    r.max_dbm = kNaN;
    r.snr_db = kNaN;
    r.extra["adversarial"] = t.adversarial ? 1.0 : 0.0;
    r.extra["victim_present"] = t.victim_present ? 1.0 : 0.0;
    r.extra["identified"] = t.identified() ? 1.0 : 0.0;
    r.extra["false_positive"] = t.false_positive() ? 1.0 : 0.0;
    r.extra["silent_messages"] = t.silent_messages;
    r.extra["matches"] = static_cast<double>(t.matches.size());
    r.extra["users"] = t.users;
    std::string m;
    for (std::uint16_t x : t.matches) {
      m += (m.empty() ? "" : " ") + std::to_string(x);
    }
    out.events.record(SimTime::from_ms(s.crowd.duration_ms), t.label, "acquisition",
                      t.victim_present ? std::optional<std::uint16_t>(t.victim_rnti) : std::nullopt, std::nullopt,
                      "matches=" + m);
    out.points.push_back(std::move(r));
  }
}

}  // namespace

int RunResult::successes() const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [](const PointResult& p) { return p.success; }));
}

const PointResult* RunResult::find(const std::string& label) const {
  for (const PointResult& p : points) {
    if (p.label == label) {
      return &p;
    }
  }
  return nullptr;
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  RunResult out;
  out.scenario = s.name;
  out.kind = s.kind;
  out.seed = opt.seed.value_or(s.seed);
  out.power_boost = opt.power_boost.value_or(s.power_boost);
  out.sched_manip = opt.sched_manip.value_or(s.sched_manip);

  if (s.kind == Kind::Calibration) {
    run_calibration(s, out);
    return out;
  }
  if (s.kind == Kind::AcquisitionCrowd) {
    run_crowd(s, out, opt.threads);
    return out;
  }

  std::vector<const PointSpec*> points;
  for (const PointSpec& p : s.points) {
    if (opt.points.empty() || std::find(opt.points.begin(), opt.points.end(), p.label) != opt.points.end()) {
      points.push_back(&p);
    }
  }
  if (points.empty()) {
    throw ConfigError("no scenario point selected");
  }
  const bool prefixed = points.size() > 1;
  std::vector<PointResult> results(points.size());
  std::vector<EventLog> logs(points.size());
  const Flags f{out.power_boost, out.sched_manip};
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    EventLog* log = opt.record_events ? &logs[i] : nullptr;
    results[i] = run_world_point(s, *points[i], out.seed, f, log, prefixed ? points[i]->label + ":" : "");
  });
  out.points = std::move(results);
  for (const EventLog& l : logs) {
    for (const Event& e : l.events()) {
      out.events.record(SimTime::from_ms(e.time_ms), e.entity, e.event, e.rnti, e.value_db, e.extra);
    }
  }
  return out;
}

Aggregate aggregate(std::span<const RunResult> runs, double q) {
  std::vector<double> b1, b2, dist, maxp, snr;
  std::size_t ok = 0;
  std::size_t rows = 0;
  for (const RunResult& r : runs) {
    for (const PointResult& p : r.points) {
      ++rows;
      ok += p.success ? 1 : 0;
      auto push = [](std::vector<double>& v, double x) {
        if (!std::isnan(x)) {
          v.push_back(x);
        }
      };
      push(b1, p.bearing_err_deg.size() > 0 ? p.bearing_err_deg[0] : kNaN);
      push(b2, p.bearing_err_deg.size() > 1 ? p.bearing_err_deg[1] : kNaN);
      push(dist, p.dist_err_m);
      push(maxp, p.max_dbm);
      push(snr, p.snr_db);
    }
  }
  auto pct = [q](const std::vector<double>& v) { return v.empty() ? kNaN : loc::percentile(v, q); };
  Aggregate a;
  a.rows = rows;
  a.success_fraction = rows > 0 ? static_cast<double>(ok) / static_cast<double>(rows) : 0.0;
  a.bearing_err_deg_1 = pct(b1);
  a.bearing_err_deg_2 = pct(b2);
  a.dist_err_m = pct(dist);
  a.max_dbm = pct(maxp);
  a.snr_db = pct(snr);
  return a;
}

BatchResult run_batch(const Scenario& s, std::span<const std::uint64_t> seeds, const RunOptions& opt) {
  if (seeds.empty()) {
    throw ConfigError("batch needs at least one seed");
  }
  BatchResult out;
  out.runs.resize(seeds.size());
  // Seeds run in parallel; points inside a run stay sequential.
  RunOptions inner = opt;
  inner.threads = 1;
  parallel_for(seeds.size(), opt.threads, [&](std::size_t i) {
    RunOptions o = inner;
    o.seed = seeds[i];
    out.runs[i] = run_scenario(s, o);
  });
  out.p70 = aggregate(out.runs, 70.0);
  return out;
}

}  // namespace ulsim::scenario
