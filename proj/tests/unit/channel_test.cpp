#include <cmath>
#include <vector>

#include "doctest.h"
#include "ulsim/channel/antenna.hpp"
#include "ulsim/channel/calibration.hpp"
#include "ulsim/channel/channel_model.hpp"
#include "ulsim/channel/repeater.hpp"
#include "ulsim/core/errors.hpp"
#include "ulsim/core/rng.hpp"

using namespace ulsim;
using namespace ulsim::channel;

namespace {

Transmission tx_at(Position p, double dbm, std::string id = "ue") {
  Transmission t;
  t.source_id = std::move(id);
  t.source_position = p;
  t.tx_power_dbm = dbm;
  t.payload = phy::MacPdu{};
  return t;
}

// Measured (distance, tx power, RSRP) rows.
const std::vector<double> kDist{10, 30, 50, 70, 90, 110};
const std::vector<double> kTx{-7.04, 0.49, 5.05, 7.65, 7.2, 7.56};
const std::vector<double> kRsrp{-62.37, -73.43, -78.91, -85.36, -86.45, -87.6};

}  // namespace

TEST_CASE("path loss at the reference distance is pl0") {
  ChannelModel m;
  CHECK(path_loss_db(m, m.d0_m) == doctest::Approx(m.pl0_db));
  CHECK(path_loss_db(m, 10.0) == doctest::Approx(m.pl0_db + 10.0 * m.exponent_n));
  CHECK_THROWS_AS(path_loss_db(m, 0.0), GeometryError);
  CHECK_THROWS_AS(path_loss_db(m, -1.0), GeometryError);
}

TEST_CASE("path loss is monotone in distance") {
  ChannelModel m;
  double prev = path_loss_db(m, 0.5);
  for (double d = 1.0; d < 500.0; d *= 1.3) {
    const double pl = path_loss_db(m, d);
    CHECK(pl > prev);
    prev = pl;
  }
}

TEST_CASE("noiseless reception and shadow area") {
  ChannelModel m;
  const Reception r = received_power(tx_at({0, 0}, 10.0), {10, 0}, 3.0, m);
  CHECK(r.power_dbm == doctest::Approx(10.0 - path_loss_db(m, 10.0) + 3.0));
  CHECK(r.detectable);
  const Reception weak = received_power(tx_at({0, 0}, -40.0), {100, 0}, 0.0, m);
  CHECK_FALSE(weak.detectable);
  CHECK_THROWS_AS(received_power(tx_at({1, 1}, 0.0), {1, 1}, 0.0, m), GeometryError);
}

TEST_CASE("shadowing draws are reproducible per stream") {
  ChannelModel m;
  Rng a = seeded_rng(7, "rx");
  Rng b = seeded_rng(7, "rx");
  for (int i = 0; i < 50; ++i) {
    CHECK(received_power(tx_at({0, 0}, 0.0), {5, 5}, 0.0, m, &a).power_dbm ==
          received_power(tx_at({0, 0}, 0.0), {5, 5}, 0.0, m, &b).power_dbm);
  }
}

TEST_CASE("capture needs the full margin; ties go to the legitimate signal") {
  CHECK(resolve_capture(-80.0, -77.0, 3.0) == CaptureWinner::Injected);
  CHECK(resolve_capture(-80.0, -77.5, 3.0) == CaptureWinner::Legitimate);
  CHECK(resolve_capture(-80.0, -80.0, 0.0) == CaptureWinner::Injected);
  ChannelModel m;
  const Transmission legit = tx_at({10, 0}, 0.0, "victim");
  const Transmission inj = tx_at({5, 0}, 20.0, "attacker");
  CHECK(resolve_capture(legit, &inj, {0, 0}, m).source_id == "attacker");
  CHECK(resolve_capture(legit, nullptr, {0, 0}, m).source_id == "victim");
}

TEST_CASE("antenna pattern") {
  AntennaPattern a;
  CHECK(antenna_gain(a, 0.0) == doctest::Approx(a.g0_db));
  CHECK(antenna_gain(a, a.beamwidth_3db_deg / 2.0) == doctest::Approx(a.g0_db - 3.0));
  CHECK(antenna_gain(a, 180.0) == doctest::Approx(a.floor_db));
  CHECK(antenna_gain(a, 370.0) == doctest::Approx(antenna_gain(a, 10.0)));
  CHECK(antenna_gain(a, -20.0) == doctest::Approx(antenna_gain(a, 20.0)));
}

TEST_CASE("repeater relays at constant output regardless of inbound power") {
  ChannelModel m;
  RepeaterModel rep;
  rep.internal_antenna = {5, -2};
  rep.external_antenna = {-2.5, 4.33};
  rep.output_power_dbm = 10.0;
  const auto lo = repeater_relay(rep, tx_at({5, 0}, -20.0), m);
  const auto hi = repeater_relay(rep, tx_at({5, 0}, 23.0), m);
  REQUIRE(lo);
  REQUIRE(hi);
  CHECK(lo->tx_power_dbm == hi->tx_power_dbm);
  CHECK(hi->source_position == rep.external_antenna);
  CHECK(hi->origin() == "ue");
  CHECK_FALSE(repeater_relay(rep, *hi, m).has_value());
  CHECK_FALSE(repeater_relay(rep, tx_at({500, 0}, -20.0), m).has_value());
}

TEST_CASE("line fit is exact on a line") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const LineFit f = fit_line(x, y);
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.max_abs_residual() == doctest::Approx(0.0));
}

TEST_CASE("calibration fit against the measured rows") {
  // Frozen from an independent least-squares solve of the same rows.
  const PathLossFit pl = fit_path_loss(kDist, kRsrp, 15.0);
  CHECK(pl.pl0_db == doctest::Approx(51.75957).epsilon(1e-6));
  CHECK(pl.exponent_n == doctest::Approx(2.531367).epsilon(1e-6));
  std::vector<double> loss;
  for (double r : kRsrp) {
    loss.push_back(15.0 - r);
  }
  const LineFit tx = fit_line(loss, kTx);
  CHECK(tx.intercept == doctest::Approx(-51.80141).epsilon(1e-6));
  CHECK(tx.slope == doctest::Approx(0.588028).epsilon(1e-6));
  for (double r : pl.rsrp_residuals_db) {
    CHECK(std::fabs(r) <= 2.0);
  }
  CHECK(tx.max_abs_residual() <= 3.0);

  // The shipped defaults are this fit.
  ChannelModel m;
  CHECK(m.pl0_db == doctest::Approx(pl.pl0_db).epsilon(1e-4));
  CHECK(m.exponent_n == doctest::Approx(pl.exponent_n).epsilon(1e-4));
}

TEST_CASE("calibration rejects degenerate input") {
  const std::vector<double> one{10};
  CHECK_THROWS_AS(fit_path_loss(one, one, 15.0), ConfigError);
  const std::vector<double> same{10, 10};
  const std::vector<double> r{-60, -61};
  CHECK_THROWS_AS(fit_path_loss(same, r, 15.0), ConfigError);
}

TEST_CASE("dbm and mw conversions invert") {
  for (double d : {-100.0, -3.0, 0.0, 23.0}) {
    CHECK(mw_to_dbm(dbm_to_mw(d)) == doctest::Approx(d));
  }
  CHECK(dbm_to_mw(0.0) == doctest::Approx(1.0));
}
