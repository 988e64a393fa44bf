#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "ulsim/core/errors.hpp"
#include "ulsim/enb/anomaly.hpp"
#include "ulsim/enb/enb.hpp"
#include "ulsim/ue/ue.hpp"

using namespace ulsim;
using namespace ulsim::enb;

namespace {

// One eNB and one UE wired back to back, uplink decoded a subframe late.
struct Cell {
  Enb enb;
  ue::UeState ue;
  std::vector<phy::MacPdu> pending_pusch;
  std::optional<phy::SchedulingRequest> pending_sr;
  std::int64_t t = 0;
  std::vector<ReceivedPdu> received;

  explicit Cell(EnbConfig cfg = {}) : enb(cfg) {
    ue.identity = 42;
    ue.path_loss_db = 70.0;
  }

  void step() {
    const SimTime now = SimTime::from_ms(t);
    for (const auto& p : pending_pusch) {
      enb.on_pusch(p, -80.0, SimTime::from_ms(t - 1), now);
      received.push_back({SimTime::from_ms(t - 1), p});
    }
    pending_pusch.clear();
    if (pending_sr) {
      enb.on_scheduling_request(*pending_sr, now);
      pending_sr.reset();
    }
    enb.expire_idle(now);
    const channel::DownlinkSubframe dl = enb.build_downlink(now);
    for (const auto& r : dl.releases) {
      ue::on_release(ue, r);
    }
    for (const auto& s : dl.setups) {
      ue::on_setup(ue, s);
    }
    for (const auto& d : dl.dcis) {
      ue::on_dci0(ue, d, now, {enb.config().k_grant, enb.config().rb_bytes});
    }
    if (auto due = ue::take_due_pusch(ue, now); due && ue.rnti) {
      pending_pusch.push_back(ue::build_pusch(ue, *due));
    } else if (auto sr = ue::maybe_send_sr(ue, now)) {
      pending_sr = sr;
    }
    ++t;
  }

  void run_to(std::int64_t end) {
    while (t < end) {
      step();
    }
  }
};

phy::MacPdu padding_zero(std::uint16_t rnti) { return phy::MacPdu::padding(rnti, 14, phy::BsrCe{3, 0}); }

}  // namespace

TEST_CASE("tpc decision is bang-bang with hysteresis") {
  TpcPolicy p;
  p.target_rx_power_dbm = -85.0;
  p.hysteresis_db = 2.0;
  CHECK(tpc_decision(p, -82.9) == 0);
  CHECK(tpc_decision(p, -83.0) == 1);
  CHECK(tpc_decision(p, -85.0) == 1);
  CHECK(tpc_decision(p, -87.0) == 1);
  CHECK(tpc_decision(p, -87.1) == 2);
  for (double rx = -140.0; rx < 0.0; rx += 0.7) {
    CHECK(tpc_decision(p, rx) != 3);
  }
}

TEST_CASE("rrc connect allocates distinct rntis and sr resources") {
  Enb e;
  const auto [a, sa] = e.rrc_connect(1, SimTime::from_ms(0));
  const auto [b, sb] = e.rrc_connect(2, SimTime::from_ms(0));
  CHECK(a.rnti == 0x3D);
  CHECK(b.rnti != a.rnti);
  CHECK(a.sr_config.pucch_resource_index != b.sr_config.pucch_resource_index);
  CHECK(sa.ue_identity == 1);
  CHECK_THROWS_AS(e.rrc_connect(1, SimTime::from_ms(1)), ConfigError);
  const auto dl = e.build_downlink(SimTime::from_ms(0));
  CHECK(dl.setups.size() == 2);
  CHECK(e.active_count() == 2);
}

TEST_CASE("sr yields one grant; bsr yields quantum grants one per subframe") {
  Enb e;
  const auto rec = e.rrc_connect(1, SimTime::from_ms(0)).first;
  const auto g = e.on_scheduling_request({rec.rnti, rec.sr_config}, SimTime::from_ms(3));
  REQUIRE(g);
  CHECK(g->kind == GrantKind::Sr);
  auto dl = e.build_downlink(SimTime::from_ms(3));
  REQUIRE(dl.dcis.size() == 1);
  CHECK(e.issued_log().back().scheduled.ms() == 7);

  const phy::MacPdu fake = phy::MacPdu::data(rec.rnti, 14, phy::BsrCe{3, 200});
  e.on_pusch(fake, -80.0, SimTime::from_ms(7), SimTime::from_ms(8));
  int issued = 0;
  for (int t = 8; t < 40; ++t) {
    const auto d = e.build_downlink(SimTime::from_ms(t));
    CHECK(d.dcis.size() <= 1);
    issued += static_cast<int>(d.dcis.size());
  }
  // 200 bytes reports as 180; 16-byte grants.
  CHECK(issued == 12);
}

TEST_CASE("sr on the wrong resource or an unknown rnti is ignored") {
  Enb e;
  const auto rec = e.rrc_connect(1, SimTime::from_ms(0)).first;
  phy::SchedulingRequestConfig other = rec.sr_config;
  other.pucch_resource_index = static_cast<std::uint16_t>(other.pucch_resource_index + 1);
  CHECK_FALSE(e.on_scheduling_request({rec.rnti, other}, SimTime::from_ms(1)));
  CHECK_FALSE(e.on_scheduling_request({0x999, rec.sr_config}, SimTime::from_ms(1)));
}

TEST_CASE("idle rnti expires at exactly the inactivity timeout") {
  Enb e;
  const auto rec = e.rrc_connect(1, SimTime::from_ms(100)).first;
  CHECK(e.expire_idle(SimTime::from_ms(100 + 14999)).empty());
  const auto gone = e.expire_idle(SimTime::from_ms(100 + 15000));
  REQUIRE(gone.size() == 1);
  CHECK(gone[0] == rec.rnti);
  CHECK(e.find(rec.rnti)->state == RntiState::Expired);
  CHECK_FALSE(e.on_scheduling_request({rec.rnti, rec.sr_config}, SimTime::from_ms(20000)));
  CHECK(e.sr_on_expired_count() == 1);
  CHECK(e.build_downlink(SimTime::from_ms(15100)).releases.size() == 1);
}

TEST_CASE("activity every second keeps the rnti") {
  Enb e;
  const auto rec = e.rrc_connect(1, SimTime::from_ms(0)).first;
  for (int s = 1; s <= 60; ++s) {
    e.deliver_downlink(1, channel::Bearer::Drb2, SimTime::from_ms(s * 1000));
    CHECK(e.expire_idle(SimTime::from_ms(s * 1000 + 999)).empty());
  }
  CHECK(e.find_active_by_identity(1)->rnti == rec.rnti);
}

TEST_CASE("downlink to an idle identity connects it first") {
  Enb e;
  e.deliver_downlink(5, channel::Bearer::Srb, SimTime::from_ms(2));
  const auto dl = e.build_downlink(SimTime::from_ms(2));
  REQUIRE(dl.setups.size() == 1);
  CHECK(dl.setups[0].ue_identity == 5);
  CHECK(dl.bearer_events.size() == 2);
}

TEST_CASE("grants go only to active rntis and cover every reported buffer") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 20; ++trial) {
    Cell c;
    c.enb.deliver_downlink(c.ue.identity, channel::Bearer::Srb, SimTime::from_ms(0));
    std::uniform_int_distribution<int> bytes(1, 600);
    std::bernoulli_distribution arrive(0.01);
    for (int t = 0; t < 20000; ++t) {
      if (c.ue.rnti && arrive(g)) {
        c.ue.buffer_bytes += static_cast<std::uint32_t>(bytes(g));
      }
      c.step();
    }
    // Every issued grant targeted an RNTI that was active when issued.
    for (const UplinkGrant& gr : c.enb.issued_log()) {
      const RntiRecord* r = c.enb.find(gr.rnti);
      REQUIRE(r != nullptr);
      CHECK(r->connected <= gr.issued);
    }
    // Between two zero reports, granted bytes reach the largest report.
    std::uint32_t max_report = 0;
    std::uint32_t granted = 0;
    for (const ReceivedPdu& rx : c.received) {
      granted += rx.pdu.payload_len_bytes + phy::kBsrCeBytes;
      if (!rx.pdu.bsr) {
        continue;
      }
      if (rx.pdu.bsr->buffer_size_bytes == 0) {
        CHECK(granted >= max_report);
        max_report = 0;
        granted = 0;
      } else {
        max_report = std::max(max_report, rx.pdu.bsr->buffer_size_bytes);
      }
    }
    CHECK_FALSE(detect_anomalies(c.received).any());
  }
}

TEST_CASE("benign ue drains its buffer and goes quiet") {
  Cell c;
  c.enb.deliver_downlink(c.ue.identity, channel::Bearer::Srb, SimTime::from_ms(0));
  c.run_to(50);
  REQUIRE(c.ue.rnti);
  c.ue.buffer_bytes = 300;
  c.run_to(400);
  CHECK(c.ue.buffer_bytes == 0);
  const auto sent = c.ue.pusch_sent;
  c.run_to(2000);
  CHECK(c.ue.pusch_sent == sent);
  CHECK_FALSE(c.enb.anomalies().flags().any());
}

TEST_CASE("anomaly thresholds") {
  const std::uint16_t r = 61;
  std::vector<ReceivedPdu> v;
  v.push_back({SimTime::from_ms(10), padding_zero(r)});
  CHECK_FALSE(detect_anomalies(v).any());
  for (int i = 1; i < 4; ++i) {
    v.push_back({SimTime::from_ms(10 + 100 * i), padding_zero(r)});
  }
  CHECK_FALSE(detect_anomalies(v).padding_only);
  v.push_back({SimTime::from_ms(500), padding_zero(r)});
  CHECK(detect_anomalies(v).padding_only);
  v.push_back({SimTime::from_ms(600), padding_zero(r)});
  const AnomalyFlags f = detect_anomalies(v);
  CHECK(f.padding_only);
  CHECK(f.zero_bsr_repeated_uplink);

  // Same PDUs spread over more than the window.
  std::vector<ReceivedPdu> slow;
  for (int i = 0; i < 20; ++i) {
    slow.push_back({SimTime::from_ms(1000 * i), padding_zero(r)});
  }
  CHECK_FALSE(detect_anomalies(slow).any());
}

TEST_CASE("buffer-emptying data pdus are not anomalous") {
  std::vector<ReceivedPdu> v;
  for (int i = 0; i < 50; ++i) {
    const std::int64_t t = 20 * i;
    v.push_back({SimTime::from_ms(t), phy::MacPdu::data(61, 14, phy::BsrCe{3, 30})});
    v.push_back({SimTime::from_ms(t + 1), phy::MacPdu::data(61, 14, phy::BsrCe{3, 0})});
  }
  CHECK_FALSE(detect_anomalies(v).any());
}

TEST_CASE("anomaly detection ignores input order and separates rntis") {
  std::vector<ReceivedPdu> v;
  for (int i = 0; i < 8; ++i) {
    v.push_back({SimTime::from_ms(10 * i), padding_zero(static_cast<std::uint16_t>(61 + i % 2))});
  }
  // Four per RNTI: below threshold for each.
  CHECK_FALSE(detect_anomalies(v).any());
  for (int i = 8; i < 12; ++i) {
    v.push_back({SimTime::from_ms(10 * i), padding_zero(61)});
  }
  const AnomalyFlags sorted = detect_anomalies(v);
  std::mt19937 g(5);
  std::shuffle(v.begin(), v.end(), g);
  CHECK(detect_anomalies(v) == sorted);
  CHECK(sorted.padding_only);
  AnomalyMonitor m;
  for (const auto& rx : v) {
    m.observe(rx);
  }
  CHECK(m.flags_for(62) == AnomalyFlags{});
}
