#include "ulsim/scenario/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulsim/channel/channel_model.hpp"
#include "ulsim/channel/repeater.hpp"
#include "ulsim/core/errors.hpp"
#include "ulsim/core/rng.hpp"
#include "ulsim/ue/power_control.hpp"
#include "ulsim/ue/traffic.hpp"

namespace ulsim::scenario {

using channel::Transmission;

namespace {

Transmission make_tx(const std::string& id, const Position& pos, double dbm, channel::Payload payload,
                     channel::Link link, channel::PhyChannel ch, SimTime at, bool injected = false) {
  Transmission t;
  t.source_id = id;
  t.source_position = pos;
  t.tx_power_dbm = dbm;
  t.payload = std::move(payload);
  t.link = link;
  t.channel = ch;
  t.subframe = at;
  t.injected = injected;
  return t;
}

std::uint64_t point_seed(std::uint64_t seed, const std::string& label) { return mix_seed(seed, "point:" + label); }

}  // namespace

InjectionPower injection_power(const Scenario& s, const Position& victim) {
  const channel::ChannelModel& ch = s.channel;
  const Position& atk = s.attacker.position;
  const Position& enb = s.enb.position;
  const double victim_pl = path_loss_db(ch, distance(victim, enb));
  auto strongest = [&](double victim_rx) {
    if (s.repeater) {
      return std::max(victim_rx, s.repeater->output_power_dbm - path_loss_db(ch, distance(s.repeater->external_antenna, enb)));
    }
    return victim_rx;
  };
  InjectionPower p;
  if (s.attacker.uplink_injection_dbm) {
    p.uplink_dbm = *s.attacker.uplink_injection_dbm;
    p.uplink_boosted_dbm = p.uplink_dbm;
  } else {
    const double to_enb = path_loss_db(ch, distance(atk, enb)) + s.attacker.injection_margin_db;
    const double open_loop = ue::compute_tx_power(s.ue_power, victim_pl, 1) - victim_pl;
    const double nominal =
        s.enb.config.tpc.enabled ? std::max(open_loop, s.enb.config.tpc.target_rx_power_dbm) : open_loop;
    p.uplink_dbm = strongest(nominal) + to_enb;
    p.uplink_boosted_dbm = strongest(channel::kUeMaxTxPowerDbm - victim_pl) + to_enb;
  }
  if (s.attacker.downlink_injection_dbm) {
    p.downlink_dbm = *s.attacker.downlink_injection_dbm;
  } else {
    const double legit = s.enb.tx_power_dbm - victim_pl;
    p.downlink_dbm = legit + path_loss_db(ch, distance(atk, victim)) + s.attacker.injection_margin_db;
  }
  return p;
}

// ---------------------------------------------------------------------------

class EnbNode : public Entity {
 public:
  EnbNode(World& w, std::uint64_t seed) : w_(w), id_(w.s_.enb.id), rng_(seeded_rng(seed, "enb:" + id_)) {}
  Role role() const override { return Role::Enb; }
  const std::string& id() const override { return id_; }

  void on_phase(Phase phase, SimTime now) override {
    if (phase != Phase::EnbDownlink) {
      return;
    }
    receive_uplink(now);
    auto& q = w_.core_queue_;
    while (!q.empty() && q.begin()->first <= now.ms()) {
      w_.enb_->deliver_downlink(q.begin()->second.first, q.begin()->second.second, now);
      q.erase(q.begin());
    }
    w_.enb_->expire_idle(now);
    channel::DownlinkSubframe sf = w_.enb_->build_downlink(now);
    w_.air_.enb_downlink = make_tx(id_, w_.s_.enb.position, w_.s_.enb.tx_power_dbm, std::move(sf),
                                   channel::Link::Downlink, channel::PhyChannel::Pdcch, now);
  }

 private:
  void receive_uplink(SimTime now) {
    const auto& ul = w_.air_.last_uplink;
    if (ul.empty()) {
      return;
    }
    const channel::ChannelModel& ch = w_.s_.channel;
    std::vector<channel::Reception> rx;
    rx.reserve(ul.size());
    for (const Transmission& t : ul) {
      rx.push_back(channel::received_power(t, w_.s_.enb.position, 0.0, ch, &rng_));
    }
    struct Contenders {
      int legit = -1;
      int injected = -1;
    };
    std::map<std::uint16_t, Contenders> pusch;
    std::map<std::uint16_t, int> sr;
    for (std::size_t i = 0; i < ul.size(); ++i) {
      const Transmission& t = ul[i];
      const int idx = static_cast<int>(i);
      if (const auto* p = std::get_if<phy::MacPdu>(&t.payload)) {
        Contenders& c = pusch[p->rnti];
        int& slot = t.injected ? c.injected : c.legit;
        if (slot < 0 || rx[i].power_dbm > rx[static_cast<std::size_t>(slot)].power_dbm) {
          slot = idx;
        }
      } else if (const auto* s = std::get_if<phy::SchedulingRequest>(&t.payload)) {
        // On-off keyed PUCCH: energy on the resource is all the eNB sees.
        auto it = sr.find(s->rnti);
        if (it == sr.end() || rx[i].power_dbm > rx[static_cast<std::size_t>(it->second)].power_dbm) {
          sr[s->rnti] = idx;
        }
      } else if (const auto* c = std::get_if<channel::ConnectionRequest>(&t.payload)) {
        if (rx[i].detectable) {
          w_.enb_->on_connection_request(*c, now);
        }
      }
    }
    for (const auto& [rnti, idx] : sr) {
      if (rx[static_cast<std::size_t>(idx)].detectable) {
        w_.enb_->on_scheduling_request(std::get<phy::SchedulingRequest>(ul[static_cast<std::size_t>(idx)].payload),
                                       now);
      }
    }
    for (const auto& [rnti, c] : pusch) {
      int win = c.legit;
      if (c.injected >= 0) {
        if (c.legit < 0 ||
            channel::resolve_capture(rx[static_cast<std::size_t>(c.legit)].power_dbm,
                                     rx[static_cast<std::size_t>(c.injected)].power_dbm,
                                     ch.capture_margin_db) == channel::CaptureWinner::Injected) {
          win = c.injected;
        }
      }
      const auto w = static_cast<std::size_t>(win);
      if (!rx[w].detectable) {
        continue;
      }
      w_.enb_->on_pusch(std::get<phy::MacPdu>(ul[w].payload), rx[w].power_dbm, ul[w].subframe, now);
    }
  }

  World& w_;
  std::string id_;
  Rng rng_;
};

// ---------------------------------------------------------------------------

class AttackerTxNode : public Entity {
 public:
  explicit AttackerTxNode(World& w) : w_(w), id_(w.s_.attacker.id) {}
  Role role() const override { return Role::Attacker; }
  const std::string& id() const override { return id_; }

  void on_phase(Phase phase, SimTime now) override {
    const Position& pos = w_.s_.attacker.position;
    if (phase == Phase::AttackerDownlink) {
      if (auto sf = w_.attacker_->downlink_injection(now)) {
        w_.air_.injected_downlink.push_back(make_tx(id_, pos, w_.injection_.downlink_dbm, std::move(*sf),
                                                    channel::Link::Downlink, channel::PhyChannel::Pdcch, now,
                                                    true));
      }
    } else if (phase == Phase::AttackerUplink) {
      const double dbm =
          w_.attacker_->boost_enabled() ? w_.injection_.uplink_boosted_dbm : w_.injection_.uplink_dbm;
      for (attack::UplinkInjection& inj : w_.attacker_->uplink_injection(now)) {
        w_.air_.uplink.push_back(make_tx(id_, pos, dbm, std::move(inj.payload),
                                         channel::Link::Uplink, inj.channel, now, true));
      }
    }
  }

 private:
  World& w_;
  std::string id_;
};

/// The attacker's downlink receiver; decodes whatever the eNB broadcast.
class AttackerRxNode : public Entity {
 public:
  explicit AttackerRxNode(World& w) : w_(w), id_(w.s_.attacker.id + "-rx") {}
  Role role() const override { return Role::Sniffer; }
  const std::string& id() const override { return id_; }

  void on_phase(Phase phase, SimTime now) override {
    if (phase != Phase::Sniff || !w_.air_.enb_downlink) {
      return;
    }
    const Transmission& dl = *w_.air_.enb_downlink;
    if (!channel::received_power(dl, w_.s_.attacker.position, 0.0, w_.s_.channel).detectable) {
      return;
    }
    w_.attacker_->observe_downlink(std::get<channel::DownlinkSubframe>(dl.payload), now);
  }

 private:
  World& w_;
  std::string id_;
};

// ---------------------------------------------------------------------------

class UeNode : public Entity {
 public:
  static constexpr std::int64_t kRequestRetryMs = 100;

  UeNode(World& w, std::string id, std::uint64_t identity, Position pos, ue::TrafficProfile traffic, bool victim,
         std::uint64_t seed)
      : w_(w),
        id_(std::move(id)),
        log_id_(w.prefix_ + id_),
        traffic_(traffic),
        victim_(victim),
        rx_rng_(seeded_rng(seed, "ue-rx:" + id_)),
        traffic_rng_(seeded_rng(seed, "ue-traffic:" + id_)) {
    st_.identity = identity;
    st_.position = pos;
    st_.power = w.s_.ue_power;
    st_.path_loss_db = path_loss_db(w.s_.channel, distance(pos, w.s_.enb.position));
    timing_.k_grant = w.s_.enb.config.k_grant;
    timing_.rb_bytes = w.s_.enb.config.rb_bytes;
  }

  Role role() const override { return Role::Ue; }
  const std::string& id() const override { return id_; }
  const ue::UeState& state() const { return st_; }

  void on_phase(Phase phase, SimTime now) override {
    if (phase != Phase::Uplink) {
      return;
    }
    receive(now);
    draw_traffic(now);
    transmit(now);
  }

 private:
  void log(SimTime at, const char* ev, std::optional<double> v = {}, std::string extra = {}) {
    if (w_.log_ != nullptr) {
      w_.log_->record(at, log_id_, ev, st_.rnti, v, std::move(extra));
    }
  }

  void receive(SimTime now) {
    if (!w_.air_.enb_downlink) {
      return;
    }
    const Transmission& dl = *w_.air_.enb_downlink;
    const channel::ChannelModel& ch = w_.s_.channel;
    const channel::Reception legit = channel::received_power(dl, st_.position, 0.0, ch, &rx_rng_);
    const auto& sf = std::get<channel::DownlinkSubframe>(dl.payload);
    const channel::DownlinkSubframe* control = legit.detectable ? &sf : nullptr;
    double best = legit.power_dbm;
    for (const Transmission& inj : w_.air_.injected_downlink) {
      const double p = channel::received_power(inj, st_.position, 0.0, ch, &rx_rng_).power_dbm;
      if (p >= ch.noise_floor_dbm &&
          channel::resolve_capture(best, p, ch.capture_margin_db) == channel::CaptureWinner::Injected) {
        control = &std::get<channel::DownlinkSubframe>(inj.payload);
        best = p;
      }
    }
    // An injected subframe replaces only the control region.
    if (legit.detectable) {
      for (const channel::RrcRelease& r : sf.releases) {
        if (ue::on_release(st_, r)) {
          log(now, "rrc_release", std::nullopt, "rnti=" + std::to_string(r.rnti));
        }
      }
      for (const channel::RrcSetupMessage& m : sf.setups) {
        if (ue::on_setup(st_, m)) {
          log(now, "rrc_setup");
        }
      }
    }
    if (control == nullptr || !st_.rnti) {
      return;
    }
    for (const phy::Dci0& d : control->dcis) {
      if (ue::on_dci0(st_, d, now, timing_)) {
        log(now, "dci0_rx", st_.power.f_db, control == &sf ? "legit" : "injected");
      }
    }
  }

  void draw_traffic(SimTime now) {
    if (traffic_.is_idle()) {
      return;
    }
    const ue::TrafficDraw d = ue::app_traffic(traffic_, traffic_rng_);
    st_.buffer_bytes += d.uplink_bytes;
    for (int i = 0; i < d.drb1; ++i) {
      w_.core_delivery(now.next(), st_.identity, channel::Bearer::Drb1);
    }
    for (int i = 0; i < d.drb2; ++i) {
      w_.core_delivery(now.next(), st_.identity, channel::Bearer::Drb2);
    }
  }

  void transmit(SimTime now) {
    auto& air = w_.air_.uplink;
    const Position& pos = st_.position;
    if (auto due = ue::take_due_pusch(st_, now); due && st_.rnti) {
      const phy::MacPdu pdu = ue::build_pusch(st_, *due);
      const double p = ue::pusch_tx_power(st_, due->rb_count);
      if (victim_) {
        w_.victim_pusch_.push_back({now, p, pdu});
      }
      log(now, "pusch_tx", p,
          std::string(pdu.kind == phy::PayloadKind::Padding ? "padding" : "data") +
              ";bsr=" + std::to_string(pdu.bsr ? pdu.bsr->buffer_size_bytes : 0) +
              ";rb=" + std::to_string(due->rb_count));
      air.push_back(make_tx(id_, pos, p, pdu, channel::Link::Uplink, channel::PhyChannel::Pusch, now));
    } else if (auto sr = ue::maybe_send_sr(st_, now)) {
      air.push_back(make_tx(id_, pos, ue::pusch_tx_power(st_, 1), *sr, channel::Link::Uplink,
                            channel::PhyChannel::Pucch, now));
    } else if (!st_.rnti && st_.buffer_bytes > 0 &&
               (!st_.connection_requested || now.ms() - last_request_ms_ >= kRequestRetryMs)) {
      st_.connection_requested = true;
      last_request_ms_ = now.ms();
      air.push_back(make_tx(id_, pos, ue::pusch_tx_power(st_, 1), channel::ConnectionRequest{st_.identity},
                            channel::Link::Uplink, channel::PhyChannel::Pucch, now));
    }
  }

  World& w_;
  std::string id_;
  std::string log_id_;
  ue::TrafficProfile traffic_;
  bool victim_;
  ue::UeState st_;
  ue::UeTiming timing_;
  Rng rx_rng_;
  Rng traffic_rng_;
  std::int64_t last_request_ms_ = 0;
};

// ---------------------------------------------------------------------------

class RepeaterNode : public Entity {
 public:
  RepeaterNode(World& w, std::uint64_t seed)
      : w_(w), id_(w.s_.repeater->id), rng_(seeded_rng(seed, "repeater:" + id_)) {}
  Role role() const override { return Role::Repeater; }
  const std::string& id() const override { return id_; }

  void on_phase(Phase phase, SimTime) override {
    if (phase != Phase::Uplink) {
      return;
    }
    auto& ul = w_.air_.uplink;
    const std::size_t n = ul.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (ul[i].injected || ul[i].is_relay()) {
        continue;
      }
      if (auto relay = channel::repeater_relay(*w_.s_.repeater, ul[i], w_.s_.channel, &rng_)) {
        ul.push_back(std::move(*relay));
      }
    }
  }

 private:
  World& w_;
  std::string id_;
  Rng rng_;
};

// ---------------------------------------------------------------------------

class SnifferNode : public Entity {
 public:
  SnifferNode(World& w, const SnifferSpec& spec, Position pos, std::uint64_t seed)
      : w_(w),
        id_(spec.id),
        pos_(pos),
        sweep_cfg_(spec.sweep),
        sweeper_(spec.sweep, pos, w.s_.channel.noise_floor_dbm),
        rng_(seeded_rng(seed, "sniffer:" + spec.id)) {}

  Role role() const override { return Role::Sniffer; }
  const std::string& id() const override { return id_; }
  const Position& position() const { return pos_; }

  void start_sweep(SimTime now) { sweeper_.start(now); }
  bool sweep_done() const { return sweeper_.done(); }
  loc::SweepProfile profile() const { return sweeper_.profile(); }

  void start_probe(double bearing, int samples) {
    probe_bearing_ = bearing;
    probe_left_ = samples;
    probe_sum_ = 0.0;
    probe_n_ = 0;
  }
  bool probe_done() const { return probe_left_ <= 0; }
  double probe_mean() const {
    return probe_n_ > 0 ? probe_sum_ / probe_n_ : std::numeric_limits<double>::quiet_NaN();
  }

  void on_phase(Phase phase, SimTime now) override {
    if (phase != Phase::Sniff) {
      return;
    }
    sweeper_.tick(now);
    const bool probing = probe_left_ > 0;
    if (!sweeper_.active() && !probing) {
      return;
    }
    const attack::Attacker& atk = *w_.attacker_;
    if (!atk.clean_victim_subframe(now) || !atk.state().target_rnti) {
      return;
    }
    const std::uint16_t target = *atk.state().target_rnti;
    const channel::ChannelModel& ch = w_.s_.channel;
    signals_.clear();
    for (const Transmission& t : w_.air_.uplink) {
      const auto* pdu = std::get_if<phy::MacPdu>(&t.payload);
      if (t.injected || pdu == nullptr || pdu->rnti != target) {
        continue;
      }
      const double p = channel::received_power(t, pos_, 0.0, ch, &rng_).power_dbm;
      signals_.push_back({t.source_position, p});
    }
    const double pointing = probing ? probe_bearing_ : sweeper_.pointing_deg();
    const double v = loc::sample_power(sweep_cfg_.antenna, pos_, pointing, signals_, ch.noise_floor_dbm,
                                       sweep_cfg_.noise_jitter_db, &rng_);
    if (probing) {
      probe_sum_ += v;
      ++probe_n_;
      --probe_left_;
    } else {
      sweeper_.add_sample(v);
    }
  }

 private:
  World& w_;
  std::string id_;
  Position pos_;
  loc::SweepConfig sweep_cfg_;
  loc::Sweeper sweeper_;
  Rng rng_;
  std::vector<loc::ArrivingSignal> signals_;
  double probe_bearing_ = 0.0;
  int probe_left_ = 0;
  double probe_sum_ = 0.0;
  int probe_n_ = 0;
};

// ---------------------------------------------------------------------------

World::World(const Scenario& s, const PointSpec& point, std::uint64_t seed, EventLog* log, std::string log_prefix)
    : s_(s),
      victim_pos_(point.victim),
      prefix_(std::move(log_prefix)),
      log_(log),
      injection_(injection_power(s, point.victim)),
      engine_(s.duration_ms) {
  const std::uint64_t pseed = point_seed(seed, point.label);
  enb_ = std::make_unique<enb::Enb>(s_.enb.config, log_, prefix_ + s_.enb.id);
  attack::AttackConfig acfg = s_.attacker.config;
  acfg.uplink_injection_dbm = injection_.uplink_dbm;
  acfg.downlink_injection_dbm = injection_.downlink_dbm;
  attacker_ = std::make_unique<attack::Attacker>(acfg, log_, prefix_ + s_.attacker.id);

  enb_node_ = std::make_unique<EnbNode>(*this, pseed);
  attacker_tx_ = std::make_unique<AttackerTxNode>(*this);
  attacker_rx_ = std::make_unique<AttackerRxNode>(*this);
  engine_.add(*enb_node_);
  engine_.add(*attacker_tx_);
  engine_.add(*attacker_rx_);

  ues_.push_back(std::make_unique<UeNode>(*this, s_.victim_id, kVictimIdentity, victim_pos_, s_.victim_traffic, true,
                                          pseed));
  std::uint64_t identity = kVictimIdentity;
  for (const UeSpec& u : s_.ues) {
    ues_.push_back(std::make_unique<UeNode>(*this, u.id, ++identity, u.position, u.traffic, false, pseed));
  }
  for (auto& u : ues_) {
    engine_.add(*u);
  }
  if (s_.repeater) {
    repeater_ = std::make_unique<RepeaterNode>(*this, pseed);
    engine_.add(*repeater_);
  }
  for (const SnifferSpec& sn : s_.sniffers) {
    auto it = point.sniffers.find(sn.id);
    const Position pos = it != point.sniffers.end() ? it->second : sn.position;
    sniffers_.push_back(std::make_unique<SnifferNode>(*this, sn, pos, pseed));
    engine_.add(*sniffers_.back());
  }
}

World::~World() = default;

bool World::step() {
  if (engine_.finished()) {
    return false;
  }
  air_.last_uplink = std::move(air_.uplink);
  air_.uplink.clear();
  air_.enb_downlink.reset();
  air_.injected_downlink.clear();
  return engine_.advance();
}

const ue::UeState& World::victim() const { return ues_.front()->state(); }

void World::core_delivery(SimTime at, std::uint64_t identity, channel::Bearer bearer) {
  core_queue_.emplace(at.ms(), std::make_pair(identity, bearer));
}

const std::string& World::sniffer_id(std::size_t i) const { return sniffers_.at(i)->id(); }
Position World::sniffer_position(std::size_t i) const { return sniffers_.at(i)->position(); }

void World::start_sweeps() {
  for (auto& s : sniffers_) {
    s->start_sweep(now());
  }
}

bool World::sweeps_done() const {
  return std::all_of(sniffers_.begin(), sniffers_.end(), [](const auto& s) { return s->sweep_done(); });
}

loc::SweepProfile World::sweep_profile(std::size_t i) const { return sniffers_.at(i)->profile(); }

void World::start_probe(std::size_t sniffer, double bearing_deg, int samples) {
  sniffers_.at(sniffer)->start_probe(bearing_deg, samples);
}

bool World::probe_done(std::size_t sniffer) const { return sniffers_.at(sniffer)->probe_done(); }

double World::probe_mean_dbm(std::size_t sniffer) const { return sniffers_.at(sniffer)->probe_mean(); }

}  // namespace ulsim::scenario
