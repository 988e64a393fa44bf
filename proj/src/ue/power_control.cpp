#include "ulsim/ue/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ulsim/core/errors.hpp"
#include "ulsim/phy/dci0.hpp"

namespace ulsim::ue {

double tpc_delta(int command) { return phy::tpc_accumulated_delta_db(command); }

void PowerControlState::apply_tpc(int command) { f_db = std::max(f_floor_db, f_db + tpc_delta(command)); }

void PowerControlState::apply_tpc(std::span<const int> commands) {
  for (int c : commands) {
    apply_tpc(c);
  }
}

void PowerControlState::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must be in [0, 1]");
  }
  if (!std::isfinite(p0_dbm) || !std::isfinite(p_cmax_dbm)) {
    throw ConfigError("power control parameters must be finite");
  }
}

double compute_tx_power(const PowerControlState& s, double path_loss_db, int rb_count) {
  if (rb_count < 1) {
    throw ConfigError("rb_count must be >= 1, got " + std::to_string(rb_count));
  }
  const double open = s.p0_dbm + 10.0 * std::log10(static_cast<double>(rb_count)) + s.alpha * path_loss_db;
  return std::min(s.p_cmax_dbm, open + s.f_db);
}

}  // namespace ulsim::ue
