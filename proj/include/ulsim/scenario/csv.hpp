#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "ulsim/scenario/runner.hpp"

namespace ulsim::scenario {

inline constexpr std::string_view kMetricsHeader =
    "scenario,seed,point,success,bearing_err_deg_1,bearing_err_deg_2,dist_err_m,max_dbm,snr_db";
inline constexpr std::string_view kSweepHeader = "seed,point,sniffer,angle_deg,mean_dbm,samples";

/// One row per point per run; with `p70`, a trailing aggregate row whose
/// success column holds the success fraction.
void write_metrics_csv(std::ostream& out, std::span<const RunResult> runs, const Aggregate* p70 = nullptr);
void write_sweep_csv(std::ostream& out, std::span<const RunResult> runs);
/// key=value lines: run flags, per-point phases, failures and extra metrics.
void write_summary(std::ostream& out, const RunResult& run);
std::string summary_line(const RunResult& run);

/// metrics.csv, events.csv, sweep.csv and summary.txt under `dir`.
void write_run_outputs(const std::string& dir, const RunResult& run);
/// As above for a batch: events_seed<N>.csv per run, summary per run.
void write_batch_outputs(const std::string& dir, const BatchResult& batch);

}  // namespace ulsim::scenario
