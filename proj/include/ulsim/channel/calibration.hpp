#pragma once

#include <span>
#include <vector>

namespace ulsim::channel {

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::vector<double> residuals;  // predicted - observed
  double max_abs_residual() const;
  double rms_residual() const;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits pl0 and n of the log-distance model to RSRP observations, where
/// PL = reference_power_dbm - RSRP. Residuals are in RSRP (dB).
struct PathLossFit {
  double pl0_db = 0.0;
  double exponent_n = 0.0;
  std::vector<double> rsrp_residuals_db;
};

PathLossFit fit_path_loss(std::span<const double> distances_m, std::span<const double> rsrp_dbm,
                          double reference_power_dbm, double d0_m = 1.0);

}  // namespace ulsim::channel
