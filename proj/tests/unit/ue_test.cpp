#include <cmath>
#include <vector>

#include "doctest.h"
#include "ulsim/core/errors.hpp"
#include "ulsim/core/rng.hpp"
#include "ulsim/ue/power_control.hpp"
#include "ulsim/ue/traffic.hpp"
#include "ulsim/ue/ue.hpp"

using namespace ulsim;
using namespace ulsim::ue;

namespace {

UeState connected(std::uint16_t rnti = 100) {
  UeState u;
  u.identity = 1;
  u.rnti = rnti;
  u.sr_config = phy::SchedulingRequestConfig::from_period_offset(0, 10, 2);
  u.path_loss_db = 80.0;
  return u;
}

phy::Dci0 dci(std::uint16_t rnti, std::uint8_t tpc, int rbs = 1) {
  phy::Dci0 d;
  d.rnti = rnti;
  d.rb = {0, rbs};
  d.tpc_command = tpc;
  return d;
}

}  // namespace

TEST_CASE("tpc delta matches the command table") {
  const std::vector<double> expect{-1.0, 0.0, 1.0, 3.0};
  for (int c = 0; c < 4; ++c) {
    CHECK(tpc_delta(c) == expect[static_cast<std::size_t>(c)]);
  }
  CHECK_THROWS_AS(tpc_delta(7), DecodeError);
}

TEST_CASE("accumulation and floor") {
  PowerControlState s;
  const std::vector<int> cmds{3, 3, 0, 2, 1};
  s.apply_tpc(cmds);
  CHECK(s.f_db == doctest::Approx(6.0));
  for (int i = 0; i < 100; ++i) {
    s.apply_tpc(0);
  }
  CHECK(s.f_db == doctest::Approx(s.f_floor_db));
}

TEST_CASE("open-loop power formula") {
  PowerControlState s;
  CHECK(compute_tx_power(s, 100.0, 1) == doctest::Approx(s.p0_dbm + s.alpha * 100.0));
  CHECK(compute_tx_power(s, 100.0, 10) == doctest::Approx(s.p0_dbm + 10.0 + s.alpha * 100.0));
  CHECK_THROWS_AS(compute_tx_power(s, 100.0, 0), ConfigError);
}

TEST_CASE("repeated boosts give min(23, base + 3n) exactly") {
  for (double pl : {40.0, 60.0, 75.0, 90.0, 110.0}) {
    UeState u = connected();
    u.path_loss_db = pl;
    const double base = pusch_tx_power(u, 1);
    for (int n = 1; n <= 40; ++n) {
      REQUIRE(on_dci0(u, dci(100, 3), SimTime::from_ms(n * 10)));
      CHECK(pusch_tx_power(u, 1) == std::min(kPcmaxDbm, base + 3.0 * n));
    }
  }
}

TEST_CASE("positive steps stop accumulating at P_CMAX") {
  UeState u = connected();
  u.path_loss_db = 110.0;
  for (int n = 0; n < 20; ++n) {
    on_dci0(u, dci(100, 3), SimTime::from_ms(n));
  }
  CHECK(pusch_tx_power(u, 1) == kPcmaxDbm);
  const double f = u.power.f_db;
  on_dci0(u, dci(100, 2), SimTime::from_ms(30));
  CHECK(u.power.f_db == f);
  on_dci0(u, dci(100, 0), SimTime::from_ms(31));
  CHECK(u.power.f_db == f - 1.0);
}

TEST_CASE("dci for another rnti is ignored") {
  UeState u = connected(100);
  CHECK_FALSE(on_dci0(u, dci(101, 3), SimTime::from_ms(5)));
  CHECK(u.power.f_db == 0.0);
  CHECK(u.scheduled.empty());
  UeState idle;
  CHECK_FALSE(on_dci0(idle, dci(0, 3), SimTime::from_ms(5)));
}

TEST_CASE("grant schedules a pusch k subframes later") {
  UeState u = connected();
  const auto p = on_dci0(u, dci(100, 1, 2), SimTime::from_ms(10), UeTiming{4, 16});
  REQUIRE(p);
  CHECK(p->at.ms() == 14);
  CHECK(p->grant_bytes == 32);
  CHECK_FALSE(take_due_pusch(u, SimTime::from_ms(13)));
  CHECK(take_due_pusch(u, SimTime::from_ms(14)));
  CHECK(u.scheduled.empty());
}

TEST_CASE("empty buffer answers a grant with padding and a zero bsr") {
  UeState u = connected();
  const phy::MacPdu pdu = build_pusch(u, ScheduledPusch{SimTime::from_ms(4), 16, 1});
  CHECK(pdu.kind == phy::PayloadKind::Padding);
  REQUIRE(pdu.bsr);
  CHECK(pdu.bsr->buffer_size_bytes == 0);
  CHECK(pdu.rnti == 100);
}

TEST_CASE("data fills the grant and reports the remainder") {
  UeState u = connected();
  u.buffer_bytes = 40;
  const phy::MacPdu a = build_pusch(u, ScheduledPusch{SimTime::from_ms(4), 16, 1});
  CHECK(a.kind == phy::PayloadKind::Data);
  CHECK(a.sdu_bytes() == 14);
  CHECK(a.bsr->buffer_size_bytes == 26);
  const phy::MacPdu b = build_pusch(u, ScheduledPusch{SimTime::from_ms(5), 32, 2});
  CHECK(b.sdu_bytes() == 26);
  CHECK(b.bsr->buffer_size_bytes == 0);
}

TEST_CASE("sr only on an occasion with buffered data and no grant") {
  UeState u = connected();
  CHECK_FALSE(maybe_send_sr(u, SimTime::from_ms(12)));
  u.buffer_bytes = 10;
  CHECK(maybe_send_sr(u, SimTime::from_ms(12)));
  CHECK_FALSE(maybe_send_sr(u, SimTime::from_ms(13)));
  on_dci0(u, dci(100, 1), SimTime::from_ms(20));
  CHECK_FALSE(maybe_send_sr(u, SimTime::from_ms(22)));
}

TEST_CASE("setup adopts rnti and resets closed loop; release forgets it") {
  UeState u;
  u.identity = 9;
  u.power.f_db = 5.0;
  channel::RrcSetupMessage m;
  m.rnti = 77;
  m.ue_identity = 8;
  CHECK_FALSE(on_setup(u, m));
  m.ue_identity = 9;
  CHECK(on_setup(u, m));
  CHECK(u.rnti == 77);
  CHECK(u.power.f_db == 0.0);
  CHECK_FALSE(on_release(u, {78}));
  CHECK(on_release(u, {77}));
  CHECK_FALSE(u.rnti.has_value());
}

TEST_CASE("idle traffic draws nothing; busy traffic averages its rate") {
  Rng rng = seeded_rng(3, "traffic");
  TrafficDraw d = app_traffic(TrafficProfile::idle(), rng);
  CHECK(d.uplink_bytes == 0);
  TrafficProfile p;
  p.uplink_packets_per_s = 50.0;
  p.uplink_packet_bytes = 100;
  std::uint64_t bytes = 0;
  for (int i = 0; i < 20000; ++i) {
    bytes += app_traffic(p, rng).uplink_bytes;
  }
  // 20 s at 50 packets/s of 100 bytes; Poisson sd is ~3%.
  CHECK(static_cast<double>(bytes) == doctest::Approx(100000.0).epsilon(0.1));
  p.drb1_per_s = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
