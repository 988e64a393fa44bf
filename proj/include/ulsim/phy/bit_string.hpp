#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ulsim::phy {

/// Most-significant-bit-first bit sequence, the on-air representation used
/// by every codec in this module.
class BitString {
 public:
  BitString() = default;

  static BitString from_string(std::string_view bits);

  /// Appends the low `width` bits of `value`, MSB first.
  void append(std::uint64_t value, int width);

  /// Reads `width` bits starting at `offset`.
  std::uint64_t read(std::size_t offset, int width) const;

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace ulsim::phy
