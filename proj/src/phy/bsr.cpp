#include "ulsim/phy/bsr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ulsim/core/errors.hpp"

namespace ulsim::phy {

const std::array<std::uint32_t, kBsrLevels>& bsr_level_table() {
  static const std::array<std::uint32_t, kBsrLevels> table = [] {
    std::array<std::uint32_t, kBsrLevels> t{};
    t[0] = 0;
    const double log_max = std::log(static_cast<double>(kBsrTableMaxBytes));
    for (int k = 1; k < kBsrLevels; ++k) {
      const double v = std::exp(log_max * static_cast<double>(k - 1) / static_cast<double>(kBsrLevels - 2));
      const auto rounded = static_cast<std::uint32_t>(std::lround(v));
      t[static_cast<std::size_t>(k)] = std::max(rounded, t[static_cast<std::size_t>(k - 1)] + 1);
    }
    return t;
  }();
  return table;
}

int bsr_index(std::uint32_t bytes) {
  const auto& t = bsr_level_table();
  const auto it = std::upper_bound(t.begin(), t.end(), bytes);
  return static_cast<int>(it - t.begin()) - 1;
}

std::uint32_t bsr_level_lower_bound(int index) {
  if (index < 0 || index >= kBsrLevels) {
    throw DecodeError("BSR index out of range");
  }
  return bsr_level_table()[static_cast<std::size_t>(index)];
}

BitString encode_bsr(const BsrCe& b) {
  if (b.lcid > kMaxLcid) {
    throw EncodeError("LCID out of range: " + std::to_string(b.lcid));
  }
  BitString bits;
  bits.append(b.lcid, 5);
  bits.append(static_cast<std::uint64_t>(bsr_index(b.buffer_size_bytes)), 6);
  return bits;
}

BsrCe decode_bsr(const BitString& bits) {
  if (bits.size() != static_cast<std::size_t>(kBsrBits)) {
    throw DecodeError("BSR CE must be 11 bits");
  }
  const auto lcid = static_cast<std::uint8_t>(bits.read(0, 5));
  if (lcid > kMaxLcid) {
    throw DecodeError("LCID out of range: " + std::to_string(lcid));
  }
  return BsrCe{lcid, bsr_level_lower_bound(static_cast<int>(bits.read(5, 6)))};
}

MacPdu MacPdu::data(std::uint16_t rnti, std::uint32_t sdu_bytes, std::optional<BsrCe> bsr) {
  return MacPdu{rnti, bsr, PayloadKind::Data, sdu_bytes};
}

MacPdu MacPdu::padding(std::uint16_t rnti, std::uint32_t len_bytes, std::optional<BsrCe> bsr) {
  return MacPdu{rnti, bsr, PayloadKind::Padding, len_bytes};
}

}  // namespace ulsim::phy
