#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ulsim::attack {

/// What disambiguation needs from the running attack: a way to switch
/// power boosting on and to measure mean arrival power along a bearing.
class BoostController {
 public:
  virtual ~BoostController() = default;
  virtual void enable_boost() = 0;
  virtual double measure(double bearing_deg) = 0;
};

struct DisambiguationResult {
  std::size_t index = 0;
  std::vector<double> pre_dbm;
  std::vector<double> post_dbm;
  std::vector<double> rise_db;
};

/// Measures every candidate, boosts, re-measures and picks the bearing whose
/// power rose by at least `delta_threshold_db` (the largest rise if several).
/// A repeater relays at constant power, so only the UE direction rises.
/// Throws InconclusiveError when nothing rises.
DisambiguationResult disambiguate_repeater(std::span<const double> candidates_deg, BoostController& ctl,
                                           double delta_threshold_db = 5.0);

}  // namespace ulsim::attack
