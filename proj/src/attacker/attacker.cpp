#include "ulsim/attacker/attacker.hpp"

#include <algorithm>

#include "ulsim/core/errors.hpp"
#include "ulsim/phy/dci0.hpp"

namespace ulsim::attack {

void AttackState::validate() const {
  if (!(duty_cycle > 0.0 && duty_cycle <= 1.0)) {
    throw ConfigError("duty cycle must be in (0, 1]");
  }
  if (boost_subframe < 0 || boost_subframe > 9) {
    throw ConfigError("boost subframe must be 0..9");
  }
}

ForgedEndpoint forge_uplink_channel(const AttackState& state) {
  if (!state.target_rnti) {
    throw NotObservedError("no target RNTI acquired");
  }
  if (!state.sr_config) {
    throw NotObservedError("target SR configuration not captured");
  }
  return ForgedEndpoint{*state.target_rnti, *state.sr_config};
}

void AttackConfig::validate() const {
  AttackState{std::nullopt, std::nullopt, duty_cycle, boost_subframe, uplink_injection_dbm}.validate();
  if (duty_window_ms < 1 || k_grant < 1 || grant_wait_ms < 1 || verify_ms < 1) {
    throw ConfigError("attack timers must be >= 1 ms");
  }
  if (fake_lcid > phy::kMaxLcid) {
    throw ConfigError("fake BSR LCID out of range");
  }
  pattern.validate();
}

Attacker::Attacker(AttackConfig cfg, EventLog* log, std::string id) : cfg_(cfg), log_(log), id_(std::move(id)) {
  cfg_.validate();
  state_.duty_cycle = cfg_.duty_cycle;
  state_.boost_subframe = cfg_.boost_subframe;
  state_.injected_tx_power_dbm = cfg_.uplink_injection_dbm;
}

void Attacker::log(SimTime at, const char* event, std::optional<double> v, std::string extra) {
  if (log_ != nullptr) {
    log_->record(at, id_, event, state_.target_rnti, v, std::move(extra));
  }
}

void Attacker::observe_downlink(const channel::DownlinkSubframe& sf, SimTime at) {
  for (const channel::RrcSetupMessage& s : sf.setups) {
    setups_.push_back({s, at});
  }
  for (const channel::BearerEvent& e : sf.bearer_events) {
    observations_.push_back({e.rnti, e.bearer, at});
  }
  if (!state_.target_rnti) {
    return;
  }
  for (const phy::Dci0& d : sf.dcis) {
    if (d.rnti != *state_.target_rnti) {
      continue;
    }
    const SimTime sched = at.plus_ms(cfg_.k_grant);
    victim_sched_.insert(sched.ms());
    last_legit_sched_ms_ = std::max(last_legit_sched_ms_, sched.ms());
    DutyWindow& w = duty_[at.ms() / cfg_.duty_window_ms];
    w.window_start_ms = (at.ms() / cfg_.duty_window_ms) * cfg_.duty_window_ms;
    ++w.granted;
    ++granted_total_;
    if (step_ == Step::WaitGrant && at > step_since_) {
      inject_at_ = sched;
      step_ = Step::Inject;
    } else if (step_ == Step::Verify && at > inject_at_) {
      ++steps_ok_;
      step_ = Step::Idle;
      log(at, "sched_step_ok");
    }
  }
  const std::int64_t horizon = at.ms() - 1000;
  victim_sched_.erase(victim_sched_.begin(), victim_sched_.lower_bound(horizon));
  injected_ul_.erase(injected_ul_.begin(), injected_ul_.lower_bound(horizon));
}

std::uint16_t Attacker::acquire(SimTime window_start, SimTime window_end, int extra_bursts) {
  AcquisitionOptions opt;
  opt.window_start = window_start;
  opt.window_end = window_end;
  opt.first_burst = window_start;
  SilentPattern pattern = cfg_.pattern;
  pattern.burst_count += extra_bursts;
  const std::uint16_t rnti = acquire_rnti(pattern, observations_, opt);
  set_target(rnti);
  log(window_end, "rnti_acquired", std::nullopt, "rnti=" + std::to_string(rnti));
  return rnti;
}

void Attacker::set_target(std::uint16_t rnti) {
  state_.target_rnti = rnti;
  state_.sr_config.reset();
  forged_.reset();
}

phy::SchedulingRequestConfig Attacker::capture_config() {
  if (!state_.target_rnti) {
    throw NotObservedError("no target RNTI acquired");
  }
  state_.sr_config = capture_sr_config(setups_, *state_.target_rnti);
  return *state_.sr_config;
}

ForgedEndpoint Attacker::forge() {
  forged_ = forge_uplink_channel(state_);
  return *forged_;
}

bool Attacker::duty_allows(SimTime now) const {
  const auto it = duty_.find(now.ms() / cfg_.duty_window_ms);
  const int used = it == duty_.end() ? 0 : it->second.used;
  const int granted = it == duty_.end() ? 0 : it->second.granted;
  // A step yields the SR grant plus the BSR grants; count the SR grant now.
  return used + 1 <= cfg_.duty_cycle * (granted + 1) + 1.0;
}

double Attacker::duty_ratio() const {
  return granted_total_ > 0 ? static_cast<double>(used_total_) / static_cast<double>(granted_total_) : 0.0;
}

double Attacker::duty_excess() const {
  return static_cast<double>(used_total_) - cfg_.duty_cycle * static_cast<double>(granted_total_);
}

std::optional<channel::DownlinkSubframe> Attacker::downlink_injection(SimTime now) {
  if (!boost_enabled_ || !state_.target_rnti || now.subframe != cfg_.boost_subframe) {
    return std::nullopt;
  }
  phy::Dci0 d;
  d.rnti = *state_.target_rnti;
  d.rb = phy::RbAllocation{0, 1};
  d.tpc_command = 3;
  channel::DownlinkSubframe sf;
  sf.dcis.push_back(d);
  victim_sched_.insert(now.plus_ms(cfg_.k_grant).ms());
  ++boosts_sent_;
  return sf;
}

std::vector<UplinkInjection> Attacker::uplink_injection(SimTime now) {
  std::vector<UplinkInjection> out;
  if (!forged_) {
    return out;
  }
  switch (step_) {
    case Step::WaitGrant:
      if (now.ms() - step_since_.ms() > cfg_.grant_wait_ms) {
        ++steps_lost_;
        step_ = Step::Idle;
        log(now, "sched_step_lost", std::nullopt, "no_grant");
      }
      break;
    case Step::Inject:
      if (now == inject_at_) {
        const phy::BsrCe bsr{cfg_.fake_lcid, cfg_.fake_buffer_bytes};
        out.push_back({channel::PhyChannel::Pusch,
                       phy::MacPdu::data(forged_->rnti, cfg_.rb_bytes - phy::kBsrCeBytes, bsr)});
        injected_ul_.insert(now.ms());
        DutyWindow& w = duty_[now.ms() / cfg_.duty_window_ms];
        w.window_start_ms = (now.ms() / cfg_.duty_window_ms) * cfg_.duty_window_ms;
        ++w.used;
        ++used_total_;
        step_ = Step::Verify;
        log(now, "fake_bsr", std::nullopt, "bytes=" + std::to_string(cfg_.fake_buffer_bytes));
      } else if (now > inject_at_) {
        step_ = Step::Idle;
      }
      break;
    case Step::Verify:
      if (now.ms() - inject_at_.ms() > cfg_.verify_ms) {
        ++steps_lost_;
        step_ = Step::Idle;
        log(now, "sched_step_lost", std::nullopt, "no_followup_grant");
      }
      break;
    case Step::Idle:
      break;
  }
  if (step_ == Step::Idle && sched_enabled_ && forged_->sr_config.is_occasion(now) &&
      last_legit_sched_ms_ < now.ms() && duty_allows(now)) {
    out.push_back({channel::PhyChannel::Pucch, phy::SchedulingRequest{forged_->rnti, forged_->sr_config}});
    step_ = Step::WaitGrant;
    step_since_ = now;
    log(now, "fake_sr");
  }
  return out;
}

std::vector<DutyWindow> Attacker::duty_windows() const {
  std::vector<DutyWindow> out;
  for (const auto& [k, w] : duty_) {
    out.push_back(w);
  }
  return out;
}

double Attacker::worst_duty_excess() const {
  double worst = 0.0;
  for (const auto& [k, w] : duty_) {
    worst = std::max(worst, w.used - cfg_.duty_cycle * w.granted);
  }
  return worst;
}

}  // namespace ulsim::attack
