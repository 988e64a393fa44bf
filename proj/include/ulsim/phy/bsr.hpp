#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "ulsim/phy/bit_string.hpp"

namespace ulsim::phy {

inline constexpr std::uint8_t kMaxLcid = 10;
inline constexpr std::uint8_t kDataBearerLcid = 3;
inline constexpr int kBsrLevels = 64;
inline constexpr std::uint32_t kBsrTableMaxBytes = 150000;
/// Bytes a short BSR control element occupies in a MAC PDU (subheader + CE).
inline constexpr std::uint32_t kBsrCeBytes = 2;

/// Buffer status report control element.
struct BsrCe {
  std::uint8_t lcid = kDataBearerLcid;
  std::uint32_t buffer_size_bytes = 0;

  friend bool operator==(const BsrCe&, const BsrCe&) = default;
};

/// Lower bounds of the 64 quantisation levels: level 0 is 0 bytes, levels
/// 1..63 are exponentially spaced from 1 to 150000 bytes (strictly increasing).
const std::array<std::uint32_t, kBsrLevels>& bsr_level_table();

/// Largest level whose lower bound does not exceed `bytes` (clamps to 63).
int bsr_index(std::uint32_t bytes);

std::uint32_t bsr_level_lower_bound(int index);

// Layout, MSB first: lcid(5) | level index(6)
inline constexpr int kBsrBits = 11;

BitString encode_bsr(const BsrCe& b);

/// Returns the CE with buffer_size set to the level's lower bound.
BsrCe decode_bsr(const BitString& bits);

enum class PayloadKind { Data, Padding };

/// Uplink MAC PDU as seen by the eNB scheduler.
struct MacPdu {
  std::uint16_t rnti = 0;
  std::optional<BsrCe> bsr;
  PayloadKind kind = PayloadKind::Padding;
  std::uint32_t payload_len_bytes = 0;

  static MacPdu data(std::uint16_t rnti, std::uint32_t sdu_bytes, std::optional<BsrCe> bsr);
  static MacPdu padding(std::uint16_t rnti, std::uint32_t len_bytes, std::optional<BsrCe> bsr);

  /// Service data carried; always zero for padding PDUs.
  std::uint32_t sdu_bytes() const { return kind == PayloadKind::Data ? payload_len_bytes : 0; }

  friend bool operator==(const MacPdu&, const MacPdu&) = default;
};

}  // namespace ulsim::phy
