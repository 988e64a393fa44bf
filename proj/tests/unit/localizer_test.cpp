#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "ulsim/core/errors.hpp"
#include "ulsim/core/geometry.hpp"
#include "ulsim/core/rng.hpp"
#include "ulsim/localizer/bearing.hpp"
#include "ulsim/localizer/multiangulation.hpp"
#include "ulsim/localizer/statistics.hpp"
#include "ulsim/localizer/sweep.hpp"

using namespace ulsim;
using namespace ulsim::loc;

namespace {

BearingMeasurement ok_bearing(Position s, double deg) {
  BearingMeasurement b;
  b.sniffer = s;
  b.bearing_deg = deg;
  b.quality = BearingQuality::Ok;
  return b;
}

SweepConfig quiet_sweep() {
  SweepConfig c;
  c.samples_per_angle = 1;
  c.noise_jitter_db = 0.0;
  return c;
}

// Sort-based percentile written independently of the library.
double oracle_percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = (q / 100.0) * static_cast<double>(v.size() - 1);
  const auto below = static_cast<std::size_t>(pos);
  if (below + 1 >= v.size()) {
    return v.back();
  }
  const double w = pos - static_cast<double>(below);
  if (w == 0.0) {
    return v[below];
  }
  return (1.0 - w) * v[below] + w * v[below + 1];
}

}  // namespace

TEST_CASE("geometry helpers") {
  CHECK(bearing_deg({0, 0}, {1, 1}) == doctest::Approx(45.0));
  CHECK(bearing_deg({0, 0}, {0, -1}) == doctest::Approx(270.0));
  CHECK(wrap_360(-10.0) == doctest::Approx(350.0));
  CHECK(wrap_180(190.0) == doctest::Approx(-170.0));
  CHECK(wrap_180(180.0) == doctest::Approx(-180.0));
}

TEST_CASE("sweep angles omit the duplicate 360") {
  SweepConfig c;
  const auto a = c.angles();
  CHECK(a.size() == 72);
  CHECK(a.front() == 0.0);
  CHECK(a.back() == 355.0);
  c.start_deg = -50.0;
  c.span_deg = 100.0;
  CHECK_FALSE(c.full_circle());
  CHECK(c.angles().size() == 21);
}

TEST_CASE("single noiseless source peaks at its bearing") {
  for (double truth : {0.0, 30.0, 137.0, 272.5, 359.0}) {
    const Position s{0, 0};
    const Position src{10.0 * std::cos(deg_to_rad(truth)), 10.0 * std::sin(deg_to_rad(truth))};
    const ArrivingSignal sig{src, -60.0};
    const SweepProfile p = sweep_static(quiet_sweep(), s, std::span(&sig, 1), -100.0, 0.0, nullptr);
    const BearingMeasurement b = estimate_bearing(p);
    REQUIRE(b.bearing_deg);
    CHECK(std::fabs(wrap_180(*b.bearing_deg - truth)) <= 2.5);
    CHECK(b.quality == BearingQuality::Ok);
  }
}

TEST_CASE("bearing is invariant under a constant offset of the profile") {
  Rng rng = seeded_rng(4, "profile");
  for (int trial = 0; trial < 50; ++trial) {
    SweepProfile p;
    p.step_deg = 5.0;
    for (int i = 0; i < 72; ++i) {
      p.angles_deg.push_back(5.0 * i);
      p.mean_dbm.push_back(rng.uniform(-90.0, -40.0));
      p.samples.push_back(1);
    }
    const BearingMeasurement a = estimate_bearing(p);
    const double off = rng.uniform(-20.0, 20.0);
    for (double& v : p.mean_dbm) {
      v += off;
    }
    p.noise_floor_dbm += off;
    const BearingMeasurement b = estimate_bearing(p);
    REQUIRE(a.bearing_deg);
    REQUIRE(b.bearing_deg);
    CHECK(*a.bearing_deg == doctest::Approx(*b.bearing_deg));
    CHECK(a.snr_db == doctest::Approx(b.snr_db));
    CHECK(a.quality == b.quality);
  }
}

TEST_CASE("flat profile at the floor is undetectable; empty throws") {
  SweepProfile p;
  for (int i = 0; i < 72; ++i) {
    p.angles_deg.push_back(5.0 * i);
    p.mean_dbm.push_back(-100.0);
    p.samples.push_back(3);
  }
  CHECK(estimate_bearing(p).quality == BearingQuality::Undetectable);
  CHECK_THROWS_AS(estimate_bearing(SweepProfile{}), EmptyProfileError);
}

TEST_CASE("victim plus repeater gives two local maxima") {
  const Position s{0, 0};
  const std::vector<ArrivingSignal> sig{{{10, 0}, -60.0}, {{-10, 0.5}, -62.0}};
  const SweepProfile p = sweep_static(quiet_sweep(), s, sig, -100.0, 0.0, nullptr);
  const auto m = local_maxima(p);
  REQUIRE(m.size() >= 2);
  CHECK(std::fabs(wrap_180(p.angles_deg[m[0]] - 0.0)) <= 5.0);
  CHECK(std::fabs(wrap_180(p.angles_deg[m[1]] - 177.0)) <= 5.0);
  // Within 3 dB and far apart.
  CHECK(estimate_bearing(p).quality == BearingQuality::Ambiguous);
}

TEST_CASE("two rays cross at the known point") {
  const LocationEstimate e = multiangulate(ok_bearing({0, 0}, 45.0), ok_bearing({10, 0}, 135.0));
  CHECK(e.position.x == doctest::Approx(5.0));
  CHECK(e.position.y == doctest::Approx(5.0));
  CHECK(e.residual_m == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(multiangulate(ok_bearing({0, 0}, 90.0), ok_bearing({10, 0}, 90.0)), IllConditionedError);
  CHECK_THROWS_AS(multiangulate(ok_bearing({0, 0}, 10.0), ok_bearing({10, 0}, 13.0)), IllConditionedError);
  CHECK_THROWS_AS(multiangulate(ok_bearing({0, 0}, 10.0), ok_bearing({0, 0}, 80.0)), GeometryError);
}

TEST_CASE("multiangulation is exact for consistent noiseless bearings") {
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Position s1{u(g), u(g)};
    const Position s2{u(g), u(g)};
    const Position t{u(g), u(g)};
    const double a1 = bearing_deg(s1, t);
    const double a2 = bearing_deg(s2, t);
    if (distance(s1, t) < 1.0 || distance(s2, t) < 1.0 || std::fabs(wrap_180(a1 - a2)) < 5.0 ||
        std::fabs(std::fabs(wrap_180(a1 - a2)) - 180.0) < 5.0) {
      continue;
    }
    const LocationEstimate e = multiangulate(ok_bearing(s1, a1), ok_bearing(s2, a2));
    CHECK(localization_error(e, t) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(e.residual_m == doctest::Approx(0.0).epsilon(1e-6));
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("three sniffers average the pairwise solutions") {
  const Position t{4, 3};
  std::vector<BearingMeasurement> b;
  for (Position s : {Position{0, 0}, Position{10, 0}, Position{0, 10}}) {
    b.push_back(ok_bearing(s, bearing_deg(s, t)));
  }
  const LocationEstimate e = multiangulate(b);
  CHECK(localization_error(e, t) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("two degree bearing noise on the lab geometry stays within 2 m at p70") {
  const Position a{14.5, 0.5};
  const Position b{0.5, 0.5};
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> noise(-2.0, 2.0);
  std::vector<double> err;
  for (double x : {2.5, 7.5, 12.5}) {
    for (double y : {3.0, 5.5, 8.5}) {
      const Position t{x, y};
      for (int i = 0; i < 1000; ++i) {
        const LocationEstimate e = multiangulate(ok_bearing(a, bearing_deg(a, t) + noise(g)),
                                                 ok_bearing(b, bearing_deg(b, t) + noise(g)));
        err.push_back(localization_error(e, t));
      }
    }
  }
  CHECK(percentile(err, 70.0) <= 2.0);
}

TEST_CASE("localization error is euclidean") {
  LocationEstimate e;
  e.position = {0, 0};
  CHECK(localization_error(e, {0, 0}) == 0.0);
  CHECK(localization_error(e, {3, 4}) == doctest::Approx(5.0));
}

TEST_CASE("percentile matches a sort-based oracle") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int n : {1, 2, 3, 9, 45, 100}) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      v.push_back(u(g));
    }
    for (double q : {0.0, 10.0, 50.0, 70.0, 90.0, 100.0}) {
      CHECK(percentile(v, q) == doctest::Approx(oracle_percentile(v, q)));
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> with_fail{1.0, 2.0, inf};
  CHECK(percentile(with_fail, 100.0) == inf);
  CHECK(percentile(with_fail, 50.0) == 2.0);
  CHECK(median(std::vector<double>{3.0, 1.0, 2.0}) == 2.0);
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 50.0), ConfigError);
  CHECK_THROWS_AS(percentile(with_fail, 101.0), ConfigError);
}

TEST_CASE("sweeper moves on after W samples and times out") {
  SweepConfig c;
  c.samples_per_angle = 2;
  c.max_duration_ms = 100;
  Sweeper sw(c, {0, 0}, -100.0);
  sw.start(SimTime::from_ms(0));
  CHECK(sw.pointing_deg() == 0.0);
  sw.add_sample(-70.0);
  sw.add_sample(-72.0);
  CHECK(sw.pointing_deg() == 5.0);
  sw.tick(SimTime::from_ms(100));
  CHECK(sw.done());
  const SweepProfile p = sw.profile();
  CHECK(p.mean_dbm[0] == doctest::Approx(-71.0));
  CHECK(std::isnan(p.mean_dbm[1]));
}
