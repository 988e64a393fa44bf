#include "ulsim/scenario/csv.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ulsim/core/errors.hpp"

namespace ulsim::scenario {

namespace {

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + p.string());
  }
  return f;
}

double column(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const RunResult> runs, const Aggregate* p70) {
  out << kMetricsHeader << '\n';
  for (const RunResult& r : runs) {
    for (const PointResult& p : r.points) {
      out << r.scenario << ',' << r.seed << ',' << p.label << ',' << (p.success ? 1 : 0) << ','
          << format_fixed(column(p.bearing_err_deg, 0)) << ',' << format_fixed(column(p.bearing_err_deg, 1)) << ','
          << format_fixed(p.dist_err_m) << ',' << format_fixed(p.max_dbm) << ',' << format_fixed(p.snr_db) << '\n';
    }
  }
  if (p70 != nullptr) {
    out << (runs.empty() ? std::string{} : runs.front().scenario) << ",all,p70," << format_fixed(p70->success_fraction)
        << ',' << format_fixed(p70->bearing_err_deg_1) << ',' << format_fixed(p70->bearing_err_deg_2) << ','
        << format_fixed(p70->dist_err_m) << ',' << format_fixed(p70->max_dbm) << ',' << format_fixed(p70->snr_db)
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << kSweepHeader << '\n';
  for (const RunResult& r : runs) {
    for (const PointResult& p : r.points) {
      for (const SnifferProfile& sp : p.profiles) {
        const loc::SweepProfile& prof = sp.profile;
        for (std::size_t i = 0; i < prof.angles_deg.size(); ++i) {
          out << r.seed << ',' << p.label << ',' << sp.sniffer << ',' << format_fixed(prof.angles_deg[i], 1) << ','
              << format_fixed(prof.mean_dbm[i]) << ',' << prof.samples[i] << '\n';
        }
      }
    }
  }
}

void write_summary(std::ostream& out, const RunResult& run) {
  out << "scenario=" << run.scenario << '\n'
      << "kind=" << to_string(run.kind) << '\n'
      << "seed=" << run.seed << '\n'
      << "power_boost=" << (run.power_boost ? 1 : 0) << '\n'
      << "sched_manip=" << (run.sched_manip ? 1 : 0) << '\n'
      << "points=" << run.points.size() << '\n'
      << "successes=" << run.successes() << '\n';
  for (const PointResult& p : run.points) {
    const std::string k = p.label + ".";
    out << k << "success=" << (p.success ? 1 : 0) << '\n';
    if (!p.failure.empty()) {
      out << k << "failure=" << p.failure << '\n';
    }
    if (p.phases.total_ms > 0) {
      out << k << "phase.acquisition_ms=" << p.phases.acquisition_ms << '\n'
          << k << "phase.sched_manip_ms=" << p.phases.sched_manip_ms << '\n'
          << k << "phase.boost_ms=" << p.phases.boost_ms << '\n'
          << k << "phase.sweep_ms=" << p.phases.sweep_ms << '\n'
          << k << "phase.total_ms=" << p.phases.total_ms << '\n';
    }
    out << k << "anomaly.zero_bsr_repeated_uplink=" << (p.anomalies.zero_bsr_repeated_uplink ? 1 : 0) << '\n'
        << k << "anomaly.padding_only=" << (p.anomalies.padding_only ? 1 : 0) << '\n';
    if (p.estimate) {
      out << k << "estimate=" << format_fixed(p.estimate->x) << ' ' << format_fixed(p.estimate->y) << '\n';
    }
    for (std::size_t i = 0; i < p.bearings.size(); ++i) {
      const loc::BearingMeasurement& b = p.bearings[i];
      const std::string bk = k + "bearing" + std::to_string(i + 1) + ".";
      out << bk << "quality=" << loc::to_string(b.quality) << '\n'
          << bk << "deg=" << (b.bearing_deg ? format_fixed(*b.bearing_deg) : std::string{}) << '\n'
          << bk << "snr_db=" << format_fixed(b.snr_db) << '\n';
    }
    for (const auto& [name, v] : p.extra) {
      out << k << name << '=' << format_fixed(v) << '\n';
    }
  }
}

std::string summary_line(const RunResult& run) {
  std::ostringstream ss;
  ss << run.scenario << " seed=" << run.seed << " success=" << run.successes() << '/' << run.points.size()
     << " boost=" << (run.power_boost ? "on" : "off") << " sched_manip=" << (run.sched_manip ? "on" : "off");
  const Aggregate a = aggregate(std::span<const RunResult>(&run, 1));
  if (!std::isnan(a.dist_err_m)) {
    ss << " p70_dist_m=" << format_fixed(a.dist_err_m);
  }
  return ss.str();
}

void write_run_outputs(const std::string& dir, const RunResult& run) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);
  std::span<const RunResult> one(&run, 1);
  auto m = open(d / "metrics.csv");
  write_metrics_csv(m, one);
  auto e = open(d / "events.csv");
  run.events.write_csv(e);
  auto s = open(d / "sweep.csv");
  write_sweep_csv(s, one);
  auto sum = open(d / "summary.txt");
  write_summary(sum, run);
}

void write_batch_outputs(const std::string& dir, const BatchResult& batch) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path d(dir);
  auto m = open(d / "metrics.csv");
  write_metrics_csv(m, batch.runs, &batch.p70);
  auto s = open(d / "sweep.csv");
  write_sweep_csv(s, batch.runs);
  for (const RunResult& r : batch.runs) {
    auto e = open(d / ("events_seed" + std::to_string(r.seed) + ".csv"));
    r.events.write_csv(e);
    auto sum = open(d / ("summary_seed" + std::to_string(r.seed) + ".txt"));
    write_summary(sum, r);
  }
}

}  // namespace ulsim::scenario
