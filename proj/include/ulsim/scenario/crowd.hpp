#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ulsim/scenario/scenario.hpp"

namespace ulsim::scenario {

inline constexpr std::uint64_t kCrowdFirstIdentity = 1000;

struct CrowdTrial {
  std::string label;
  bool adversarial = false;
  bool victim_present = true;
  std::uint16_t victim_rnti = 0;
  std::vector<std::uint16_t> matches;
  int silent_messages = 0;
  int users = 0;

  /// Exactly the victim matched (or nothing, when the victim is absent).
  bool identified() const;
  /// Some non-victim RNTI matched.
  bool false_positive() const;
};

/// One acquisition trial over a background crowd served by a real eNB
/// instance. Adversarial trials add near-miss users whose timelines are
/// one step away from the silent pattern. Ambiguous matches are retried
/// with up to kMaxExtraBursts more silent messages.
CrowdTrial run_crowd_trial(const Scenario& s, std::uint64_t seed, int index, bool adversarial);

}  // namespace ulsim::scenario
