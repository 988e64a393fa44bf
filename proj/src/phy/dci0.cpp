#include "ulsim/phy/dci0.hpp"

#include <string>

#include "ulsim/core/errors.hpp"

namespace ulsim::phy {

namespace {

void check_bandwidth(int n_rb) {
  // 110 RBs keeps the largest RIV (6105) inside 13 bits.
  if (n_rb < 6 || n_rb > 110) {
    throw EncodeError("uplink bandwidth must be 6..110 RBs, got " + std::to_string(n_rb));
  }
}

}  // namespace

int tpc_accumulated_delta_db(int command) {
  static constexpr int kDelta[4] = {-1, 0, 1, 3};
  if (command < 0 || command > 3) {
    throw DecodeError("TPC command must be 0..3, got " + std::to_string(command));
  }
  return kDelta[command];
}

std::uint32_t encode_riv(RbAllocation rb, int n_rb) {
  check_bandwidth(n_rb);
  if (rb.length < 1 || rb.start < 0 || rb.start + rb.length > n_rb) {
    throw EncodeError("RB allocation outside bandwidth");
  }
  const auto n = static_cast<std::uint32_t>(n_rb);
  const auto l = static_cast<std::uint32_t>(rb.length);
  const auto s = static_cast<std::uint32_t>(rb.start);
  if (l - 1 <= n / 2) {
    return n * (l - 1) + s;
  }
  return n * (n - l + 1) + (n - 1 - s);
}

RbAllocation decode_riv(std::uint32_t riv, int n_rb) {
  check_bandwidth(n_rb);
  const auto n = static_cast<std::uint32_t>(n_rb);
  std::uint32_t l = riv / n + 1;
  std::uint32_t s = riv % n;
  if (s + l > n) {
    l = n - riv / n + 1;
    s = n - 1 - riv % n;
  }
  RbAllocation rb{static_cast<int>(s), static_cast<int>(l)};
  if (rb.length < 1 || rb.start + rb.length > n_rb || encode_riv(rb, n_rb) != riv) {
    throw DecodeError("invalid RIV " + std::to_string(riv));
  }
  return rb;
}

BitString encode_dci0(const Dci0& d, int n_rb) {
  if (d.tpc_command > 3) {
    throw EncodeError("TPC command out of range");
  }
  BitString bits;
  bits.append(d.rnti, 16);
  bits.append(0, 1);
  bits.append(d.hopping ? 1 : 0, 1);
  bits.append(encode_riv(d.rb, n_rb), kDci0RivWidth);
  bits.append(d.ndi ? 1 : 0, 1);
  bits.append(d.tpc_command, kDci0TpcWidth);
  bits.append(d.cqi_request ? 1 : 0, 1);
  bits.append(0, 2);
  if (bits.size() > static_cast<std::size_t>(kDci0Bits)) {
    throw EncodeError("DCI 0 payload exceeds 37 bits");
  }
  return bits;
}

Dci0 decode_dci0(const BitString& bits, int n_rb) {
  if (bits.size() != static_cast<std::size_t>(kDci0Bits)) {
    throw DecodeError("DCI 0 must be 37 bits, got " + std::to_string(bits.size()));
  }
  if (bits.read(16, 1) != 0) {
    throw DecodeError("format flag indicates DCI 1A");
  }
  if (bits.read(35, 2) != 0) {
    throw DecodeError("reserved bits set");
  }
  Dci0 d;
  d.rnti = static_cast<std::uint16_t>(bits.read(0, 16));
  d.hopping = bits.read(17, 1) != 0;
  d.rb = decode_riv(static_cast<std::uint32_t>(bits.read(18, kDci0RivWidth)), n_rb);
  d.ndi = bits.read(31, 1) != 0;
  d.tpc_command = static_cast<std::uint8_t>(bits.read(kDci0TpcOffset, kDci0TpcWidth));
  d.cqi_request = bits.read(34, 1) != 0;
  return d;
}

}  // namespace ulsim::phy
