#pragma once

#include <cstdint>

#include "ulsim/core/sim_time.hpp"
#include "ulsim/phy/bit_string.hpp"

namespace ulsim::phy {

inline constexpr int kMaxPucchResourceIndex = 2047;
inline constexpr int kMaxSrConfigIndex = 154;

/// schedulingRequestConfig: PUCCH resource plus I_SR (periodicity/offset).
///
/// I_SR follows the 5/10/20/40/80 ms rows of the standard SR configuration
/// table; the 1 and 2 ms rows are not used.
struct SchedulingRequestConfig {
  std::uint16_t pucch_resource_index = 0;
  std::uint8_t sr_config_index = 5;

  static SchedulingRequestConfig from_period_offset(std::uint16_t resource, int period_ms, int offset_ms);

  int periodicity_ms() const;
  int offset_ms() const;
  bool is_occasion(SimTime t) const;
  void validate() const;

  friend bool operator==(const SchedulingRequestConfig&, const SchedulingRequestConfig&) = default;
};

/// One-bit presence signal on the configured PUCCH resource. The RNTI is
/// what the eNB resolves from the resource; it is carried for logging.
struct SchedulingRequest {
  std::uint16_t rnti = 0;
  SchedulingRequestConfig config;

  friend bool operator==(const SchedulingRequest&, const SchedulingRequest&) = default;
};

// Layout, MSB first: rnti(16) | pucch resource(11) | I_SR(8) | presence(1)
inline constexpr int kSrBits = 36;

BitString encode_sr(const SchedulingRequest& sr);
SchedulingRequest decode_sr(const BitString& bits);

}  // namespace ulsim::phy
