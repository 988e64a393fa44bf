#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulsim/core/event_log.hpp"
#include "ulsim/enb/anomaly.hpp"
#include "ulsim/localizer/bearing.hpp"
#include "ulsim/localizer/sweep.hpp"
#include "ulsim/scenario/scenario.hpp"

namespace ulsim::scenario {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<bool> power_boost;
  std::optional<bool> sched_manip;
  /// Point labels to run; empty runs every point.
  std::vector<std::string> points;
  bool record_events = true;
  /// Worker threads for independent points/seeds; 0 picks the hardware count.
  int threads = 0;
};

struct PhaseDurations {
  std::int64_t acquisition_ms = 0;
  std::int64_t sched_manip_ms = 0;
  std::int64_t boost_ms = 0;
  std::int64_t sweep_ms = 0;
  /// Simulated time of the whole run; equals the sum of the phases.
  std::int64_t total_ms = 0;
};

struct SnifferProfile {
  std::string sniffer;
  loc::SweepProfile profile;
};

struct PointResult {
  std::string label;
  bool success = false;
  /// Per sniffer, in declaration order; +inf when no bearing was found.
  std::vector<double> bearing_err_deg;
  double dist_err_m = 0.0;
  double max_dbm = 0.0;
  double snr_db = 0.0;
  std::vector<loc::BearingMeasurement> bearings;
  std::optional<Position> estimate;
  PhaseDurations phases;
  enb::AnomalyFlags anomalies;
  /// First phase that failed, empty on a clean run.
  std::string failure;
  std::vector<SnifferProfile> profiles;
  /// Kind-specific metrics, written to the summary file.
  std::map<std::string, double> extra;
};

struct RunResult {
  std::string scenario;
  Kind kind = Kind::Localization;
  std::uint64_t seed = 0;
  bool power_boost = true;
  bool sched_manip = true;
  std::vector<PointResult> points;
  EventLog events;

  int successes() const;
  bool all_succeeded() const { return successes() == static_cast<int>(points.size()); }
  const PointResult* find(const std::string& label) const;
};

/// Runs every point of the scenario. Deterministic per seed; phase
/// failures are recorded in the point result, not thrown.
RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

/// 70th-percentile row over every point of every run.
struct Aggregate {
  double success_fraction = 0.0;
  double bearing_err_deg_1 = 0.0;
  double bearing_err_deg_2 = 0.0;
  double dist_err_m = 0.0;
  double max_dbm = 0.0;
  double snr_db = 0.0;
  std::size_t rows = 0;
};

Aggregate aggregate(std::span<const RunResult> runs, double q = 70.0);

struct BatchResult {
  std::vector<RunResult> runs;
  Aggregate p70;
};

/// One run per seed, in the given order. Throws ConfigError on an empty list.
BatchResult run_batch(const Scenario& s, std::span<const std::uint64_t> seeds, const RunOptions& opt = {});

}  // namespace ulsim::scenario
