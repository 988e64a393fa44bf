#include "ulsim/core/sim_time.hpp"

#include "ulsim/core/errors.hpp"

namespace ulsim {

SimTime SimTime::from_ms(std::int64_t ms) {
  if (ms < 0) {
    throw ConfigError("negative simulation time: " + std::to_string(ms));
  }
  return SimTime{ms / kSubframesPerFrame, static_cast<int>(ms % kSubframesPerFrame)};
}

SimTime SimTime::next() const {
  if (subframe + 1 == kSubframesPerFrame) {
    return SimTime{frame + 1, 0};
  }
  return SimTime{frame, subframe + 1};
}

SimTime SimTime::plus_ms(std::int64_t delta) const { return from_ms(ms() + delta); }

std::string to_string(const SimTime& t) {
  return std::to_string(t.frame) + "." + std::to_string(t.subframe);
}

}  // namespace ulsim
