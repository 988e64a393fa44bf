#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace ulsim {

inline constexpr int kSubframesPerFrame = 10;

/// LTE FDD time index: 1 ms subframes grouped into 10-subframe frames.
struct SimTime {
  std::int64_t frame = 0;
  int subframe = 0;

  static SimTime from_ms(std::int64_t ms);

  constexpr std::int64_t ms() const { return frame * kSubframesPerFrame + subframe; }

  SimTime next() const;
  SimTime plus_ms(std::int64_t delta) const;

  friend constexpr bool operator==(const SimTime&, const SimTime&) = default;
  friend constexpr auto operator<=>(const SimTime& a, const SimTime& b) { return a.ms() <=> b.ms(); }
};

std::string to_string(const SimTime& t);

}  // namespace ulsim
