#include "ulsim/channel/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "ulsim/core/errors.hpp"

namespace ulsim::channel {

double LineFit::max_abs_residual() const {
  double m = 0.0;
  for (double r : residuals) {
    m = std::max(m, std::abs(r));
  }
  return m;
}

double LineFit::rms_residual() const {
  if (residuals.empty()) {
    return 0.0;
  }
  double s = 0.0;
  for (double r : residuals) {
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(residuals.size()));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ConfigError("line fit needs at least two paired samples");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw ConfigError("line fit needs distinct x values");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals.push_back(fit.intercept + fit.slope * x[i] - y[i]);
  }
  return fit;
}

PathLossFit fit_path_loss(std::span<const double> distances_m, std::span<const double> rsrp_dbm,
                          double reference_power_dbm, double d0_m) {
  std::vector<double> x;
  std::vector<double> pl;
  for (std::size_t i = 0; i < distances_m.size(); ++i) {
    if (!(distances_m[i] > 0.0)) {
      throw GeometryError("calibration distance must be positive");
    }
    x.push_back(10.0 * std::log10(distances_m[i] / d0_m));
  }
  for (double r : rsrp_dbm) {
    pl.push_back(reference_power_dbm - r);
  }
  const LineFit line = fit_line(x, pl);
  PathLossFit out;
  out.pl0_db = line.intercept;
  out.exponent_n = line.slope;
  // RSRP residual (predicted - observed) is the negated PL residual.
  for (double r : line.residuals) {
    out.rsrp_residuals_db.push_back(-r);
  }
  return out;
}

}  // namespace ulsim::channel
