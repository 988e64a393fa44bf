#include "ulsim/attacker/repeater_disambiguation.hpp"

#include "ulsim/core/errors.hpp"

namespace ulsim::attack {

DisambiguationResult disambiguate_repeater(std::span<const double> candidates_deg, BoostController& ctl,
                                           double delta_threshold_db) {
  if (candidates_deg.empty()) {
    throw InconclusiveError("no candidate bearings");
  }
  DisambiguationResult r;
  for (double b : candidates_deg) {
    r.pre_dbm.push_back(ctl.measure(b));
  }
  ctl.enable_boost();
  bool found = false;
  for (std::size_t i = 0; i < candidates_deg.size(); ++i) {
    r.post_dbm.push_back(ctl.measure(candidates_deg[i]));
    r.rise_db.push_back(r.post_dbm[i] - r.pre_dbm[i]);
    if (r.rise_db[i] >= delta_threshold_db && (!found || r.rise_db[i] > r.rise_db[r.index])) {
      r.index = i;
      found = true;
    }
  }
  if (!found) {
    throw InconclusiveError("no candidate bearing rose after boosting");
  }
  return r;
}

}  // namespace ulsim::attack
