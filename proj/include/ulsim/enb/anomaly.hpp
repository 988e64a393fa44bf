#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <span>

#include "ulsim/core/sim_time.hpp"
#include "ulsim/phy/bsr.hpp"

namespace ulsim::enb {

struct AnomalyThresholds {
  int min_pdus = 5;
  std::int64_t window_ms = 1000;
};

struct AnomalyFlags {
  /// UE keeps sending uplink after reporting an empty buffer: zero-BSR PDUs
  /// that directly follow another zero-BSR PDU.
  bool zero_bsr_repeated_uplink = false;
  /// Uplink PDUs carry nothing but padding and a zero BSR.
  bool padding_only = false;

  bool any() const { return zero_bsr_repeated_uplink || padding_only; }
  friend bool operator==(const AnomalyFlags&, const AnomalyFlags&) = default;
};

struct ReceivedPdu {
  SimTime at;
  phy::MacPdu pdu;
};

/// Scans PDUs (any order, any RNTIs) with a sliding window per RNTI.
AnomalyFlags detect_anomalies(std::span<const ReceivedPdu> pdus, const AnomalyThresholds& th = {});

/// Streaming form used inside the eNB; flags are sticky per RNTI.
class AnomalyMonitor {
 public:
  explicit AnomalyMonitor(AnomalyThresholds th = {}) : th_(th) {}
  /// Returns true when this PDU raised a flag that was not set before.
  bool observe(const ReceivedPdu& rx);
  AnomalyFlags flags() const;
  AnomalyFlags flags_for(std::uint16_t rnti) const;

 private:
  struct Track {
    std::deque<std::int64_t> zero_bsr;
    std::deque<std::int64_t> padding;
    /// The previous PDU from this RNTI reported an empty buffer.
    bool last_zero = false;
    AnomalyFlags flags;
  };
  AnomalyThresholds th_;
  std::map<std::uint16_t, Track> tracks_;
};

}  // namespace ulsim::enb
