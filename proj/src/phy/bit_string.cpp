#include "ulsim/phy/bit_string.hpp"

#include "ulsim/core/errors.hpp"

namespace ulsim::phy {

BitString BitString::from_string(std::string_view bits) {
  BitString out;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw DecodeError("bit string contains non-binary character");
    }
    out.bits_.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

void BitString::append(std::uint64_t value, int width) {
  if (width < 0 || width > 64) {
    throw EncodeError("field width out of range");
  }
  if (width < 64 && (value >> width) != 0) {
    throw EncodeError("value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
  }
  for (int i = width - 1; i >= 0; --i) {
    bits_.push_back(static_cast<std::uint8_t>((value >> i) & 1U));
  }
}

std::uint64_t BitString::read(std::size_t offset, int width) const {
  if (width < 0 || width > 64 || offset + static_cast<std::size_t>(width) > bits_.size()) {
    throw DecodeError("read past end of bit string");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v = (v << 1) | bits_[offset + static_cast<std::size_t>(i)];
  }
  return v;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) {
    s.push_back(b ? '1' : '0');
  }
  return s;
}

}  // namespace ulsim::phy
