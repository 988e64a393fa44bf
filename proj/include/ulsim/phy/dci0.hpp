#pragma once

#include <cstdint>

#include "ulsim/phy/bit_string.hpp"

namespace ulsim::phy {

/// Contiguous PUSCH allocation.
struct RbAllocation {
  int start = 0;
  int length = 1;

  friend bool operator==(const RbAllocation&, const RbAllocation&) = default;
};

/// Uplink grant with closed-loop power control command.
///
/// The RNTI is carried as an explicit field instead of scrambling a CRC.
/// Fields not modelled (MCS/RV, DMRS cyclic shift) are not carried at all;
/// the remaining single-bit flags round-trip but are zero in every message
/// the simulator emits.
struct Dci0 {
  std::uint16_t rnti = 0;
  RbAllocation rb;
  std::uint8_t tpc_command = 1;
  bool hopping = false;
  bool ndi = false;
  bool cqi_request = false;

  friend bool operator==(const Dci0&, const Dci0&) = default;
};

// Field layout, MSB first (offset, width):
//   rnti          0  16
//   format flag  16   1   0 = format 0; 1 (format 1A) is rejected
//   hopping      17   1
//   riv          18  13   resource indication value
//   ndi          31   1
//   tpc          32   2
//   cqi request  34   1
//   reserved     35   2   must be zero
inline constexpr int kDci0Bits = 37;
inline constexpr int kDci0TpcOffset = 32;
inline constexpr int kDci0TpcWidth = 2;
inline constexpr int kDci0RivWidth = 13;
inline constexpr int kDefaultUplinkRbs = 100;

/// Resource indication value for a contiguous allocation over `n_rb` RBs.
std::uint32_t encode_riv(RbAllocation rb, int n_rb);
RbAllocation decode_riv(std::uint32_t riv, int n_rb);

/// Accumulated PUSCH power step for a TPC command: 0,1,2,3 -> -1,0,+1,+3 dB.
/// Throws DecodeError for anything outside 0..3.
int tpc_accumulated_delta_db(int command);

BitString encode_dci0(const Dci0& d, int n_rb = kDefaultUplinkRbs);
Dci0 decode_dci0(const BitString& bits, int n_rb = kDefaultUplinkRbs);

}  // namespace ulsim::phy
