#pragma once

#include <span>

namespace ulsim::ue {

inline constexpr double kPcmaxDbm = 23.0;

/// Accumulated TPC step in dB for a 2-bit command.
double tpc_delta(int command);

/// Open-loop PUSCH parameters plus accumulated closed-loop state f.
///
/// Defaults are the least-squares fit of tx power against the path loss
/// implied by the six measured RSRP rows.
struct PowerControlState {
  double p0_dbm = -51.8014;
  double alpha = 0.588028;
  double f_db = 0.0;
  double p_cmax_dbm = kPcmaxDbm;
  double f_floor_db = -40.0;

  void apply_tpc(int command);
  void apply_tpc(std::span<const int> commands);
  void validate() const;
};

/// min(p_cmax, p0 + 10 log10(M) + alpha * PL + f).
double compute_tx_power(const PowerControlState& s, double path_loss_db, int rb_count);

}  // namespace ulsim::ue
