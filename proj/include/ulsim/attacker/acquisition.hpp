#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ulsim/channel/transmission.hpp"
#include "ulsim/core/sim_time.hpp"
#include "ulsim/phy/scheduling_request.hpp"

namespace ulsim::attack {

/// Timing signature of the silent messages the attacker sends to the
/// victim's online identity.
struct SilentPattern {
  int burst_count = 4;
  std::int64_t gap_ms = 7000;
  std::int64_t tolerance_ms = 500;

  void validate() const;
};

struct DownlinkObservation {
  std::uint16_t rnti = 0;
  channel::Bearer bearer = channel::Bearer::Srb;
  SimTime timestamp;
};

struct ObservedSetup {
  channel::RrcSetupMessage setup;
  SimTime at;
};

struct AcquisitionOptions {
  /// When the first silent message was sent; a match must start within the
  /// tolerance after it.
  std::optional<SimTime> first_burst;
  std::optional<SimTime> window_start;
  std::optional<SimTime> window_end;
};

/// Start times of SRB/DRB1 bursts for one RNTI, ascending.
std::vector<std::int64_t> burst_starts(std::span<const DownlinkObservation> obs, std::uint16_t rnti,
                                       std::int64_t burst_merge_ms);

/// True if ascending `times` contains K events, each gap +- tolerance after
/// the previous one. Unrelated events in between do not break the chain.
bool matches_pattern(std::span<const std::int64_t> times, const SilentPattern& pattern,
                     std::optional<std::int64_t> first_burst_ms = std::nullopt);

/// Every RNTI whose timeline carries the pattern, ascending.
std::vector<std::uint16_t> matching_rntis(const SilentPattern& pattern, std::span<const DownlinkObservation> obs,
                                          const AcquisitionOptions& opt = {});

/// The unique matching RNTI. Throws NotFoundError or AmbiguousError.
std::uint16_t acquire_rnti(const SilentPattern& pattern, std::span<const DownlinkObservation> obs,
                           const AcquisitionOptions& opt = {});

/// Latest observed RRC setup for `rnti`. Throws NotObservedError when the
/// setup predates monitoring.
phy::SchedulingRequestConfig capture_sr_config(std::span<const ObservedSetup> setups, std::uint16_t rnti);

}  // namespace ulsim::attack
