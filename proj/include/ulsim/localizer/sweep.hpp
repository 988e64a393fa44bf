#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ulsim/channel/antenna.hpp"
#include "ulsim/core/geometry.hpp"
#include "ulsim/core/rng.hpp"
#include "ulsim/core/sim_time.hpp"

namespace ulsim::loc {

struct SweepConfig {
  double start_deg = 0.0;
  double span_deg = 360.0;
  double step_deg = 5.0;
  int samples_per_angle = 20;
  std::int64_t max_duration_ms = 120000;
  double noise_jitter_db = 1.0;
  channel::AntennaPattern antenna;

  void validate() const;
  /// Pointing angles, strictly increasing; a full circle omits the 360 duplicate.
  std::vector<double> angles() const;
  bool full_circle() const;
};

/// Mean received power per pointing angle. Angles that collected no sample
/// hold NaN.
struct SweepProfile {
  Position sniffer;
  double noise_floor_dbm = -100.0;
  bool circular = true;
  double step_deg = 5.0;
  std::vector<double> angles_deg;
  std::vector<double> mean_dbm;
  std::vector<double> snr_db;
  std::vector<int> samples;

  bool empty() const;
};

/// A signal arriving at the sniffer before antenna gain.
struct ArrivingSignal {
  Position source;
  double power_dbm = 0.0;
};

/// One antenna reading: sources weighted by the pattern plus jittered noise.
double sample_power(const channel::AntennaPattern& antenna, const Position& sniffer, double pointing_deg,
                    std::span<const ArrivingSignal> signals, double noise_floor_dbm, double noise_jitter_db,
                    Rng* rng);

/// Sequential sweep driven by the simulation: one angle at a time, moving on
/// after samples_per_angle readings, abandoning the rest on timeout.
class Sweeper {
 public:
  Sweeper(SweepConfig cfg, Position sniffer, double noise_floor_dbm);

  void start(SimTime now);
  bool active() const { return started_ && !done_; }
  bool done() const { return done_; }
  double pointing_deg() const { return angles_[index_]; }
  void add_sample(double dbm);
  /// Ends the sweep once max_duration_ms has elapsed.
  void tick(SimTime now);
  std::int64_t elapsed_ms(SimTime now) const { return now.ms() - start_ms_; }
  SweepProfile profile() const;
  const SweepConfig& config() const { return cfg_; }

 private:
  SweepConfig cfg_;
  Position sniffer_;
  double noise_floor_dbm_;
  std::vector<double> angles_;
  std::vector<double> sum_dbm_;
  std::vector<int> count_;
  std::size_t index_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::int64_t start_ms_ = 0;
};

/// Sweep of static sources with W independent readings per angle.
SweepProfile sweep_static(const SweepConfig& cfg, const Position& sniffer, std::span<const ArrivingSignal> signals,
                          double noise_floor_dbm, double shadowing_sigma_db, Rng* rng);

}  // namespace ulsim::loc
