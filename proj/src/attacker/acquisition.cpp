#include "ulsim/attacker/acquisition.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "ulsim/core/errors.hpp"

namespace ulsim::attack {

void SilentPattern::validate() const {
  if (burst_count < 2) {
    throw ConfigError("silent pattern needs at least 2 bursts");
  }
  if (gap_ms <= 6000) {
    throw ConfigError("silent pattern gap must exceed 6000 ms");
  }
  if (tolerance_ms < 0 || 2 * tolerance_ms >= gap_ms) {
    throw ConfigError("silent pattern tolerance must be in [0, gap/2)");
  }
}

namespace {

bool counts(const DownlinkObservation& o, const AcquisitionOptions& opt) {
  if (o.bearer == channel::Bearer::Drb2) {
    return false;
  }
  if (opt.window_start && o.timestamp < *opt.window_start) {
    return false;
  }
  if (opt.window_end && o.timestamp > *opt.window_end) {
    return false;
  }
  return true;
}

std::vector<std::int64_t> cluster(std::vector<std::int64_t> times, std::int64_t merge_ms) {
  std::sort(times.begin(), times.end());
  std::vector<std::int64_t> starts;
  std::int64_t last = 0;
  for (std::int64_t t : times) {
    if (starts.empty() || t - last > merge_ms) {
      starts.push_back(t);
    }
    last = t;
  }
  return starts;
}

}  // namespace

std::vector<std::int64_t> burst_starts(std::span<const DownlinkObservation> obs, std::uint16_t rnti,
                                       std::int64_t burst_merge_ms) {
  std::vector<std::int64_t> times;
  for (const DownlinkObservation& o : obs) {
    if (o.rnti == rnti && o.bearer != channel::Bearer::Drb2) {
      times.push_back(o.timestamp.ms());
    }
  }
  return cluster(std::move(times), burst_merge_ms);
}

bool matches_pattern(std::span<const std::int64_t> times, const SilentPattern& pattern,
                     std::optional<std::int64_t> first_burst_ms) {
  // chain[i]: longest run of pattern-spaced events ending at times[i], 0 if
  // no admissible run ends there.
  std::vector<int> chain(times.size(), 1);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (first_burst_ms && (times[i] < *first_burst_ms || times[i] > *first_burst_ms + pattern.tolerance_ms)) {
      chain[i] = 0;
    }
    for (std::size_t j = 0; j < i; ++j) {
      const std::int64_t gap = times[i] - times[j];
      if (chain[j] > 0 && gap >= pattern.gap_ms - pattern.tolerance_ms && gap <= pattern.gap_ms + pattern.tolerance_ms) {
        chain[i] = std::max(chain[i], chain[j] + 1);
      }
    }
    if (chain[i] >= pattern.burst_count) {
      return true;
    }
  }
  return false;
}

std::vector<std::uint16_t> matching_rntis(const SilentPattern& pattern, std::span<const DownlinkObservation> obs,
                                          const AcquisitionOptions& opt) {
  pattern.validate();
  std::map<std::uint16_t, std::vector<std::int64_t>> per_rnti;
  for (const DownlinkObservation& o : obs) {
    if (counts(o, opt)) {
      per_rnti[o.rnti].push_back(o.timestamp.ms());
    }
  }
  std::vector<std::uint16_t> out;
  for (auto& [rnti, times] : per_rnti) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const auto first = opt.first_burst ? std::optional<std::int64_t>(opt.first_burst->ms()) : std::nullopt;
    if (matches_pattern(times, pattern, first)) {
      out.push_back(rnti);
    }
  }
  return out;
}

std::uint16_t acquire_rnti(const SilentPattern& pattern, std::span<const DownlinkObservation> obs,
                           const AcquisitionOptions& opt) {
  const std::vector<std::uint16_t> m = matching_rntis(pattern, obs, opt);
  if (m.empty()) {
    throw NotFoundError("no RNTI shows the silent-message pattern");
  }
  if (m.size() > 1) {
    throw AmbiguousError(std::to_string(m.size()) + " RNTIs show the silent-message pattern");
  }
  return m.front();
}

phy::SchedulingRequestConfig capture_sr_config(std::span<const ObservedSetup> setups, std::uint16_t rnti) {
  const ObservedSetup* latest = nullptr;
  for (const ObservedSetup& s : setups) {
    if (s.setup.rnti == rnti && (latest == nullptr || s.at >= latest->at)) {
      latest = &s;
    }
  }
  if (latest == nullptr) {
    throw NotObservedError("RRC setup for RNTI " + std::to_string(rnti) + " was not observed");
  }
  return latest->setup.sr_config;
}

}  // namespace ulsim::attack
