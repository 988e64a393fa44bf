#include "ulsim/localizer/bearing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulsim/core/errors.hpp"
#include "ulsim/localizer/statistics.hpp"

namespace ulsim::loc {

const char* to_string(BearingQuality q) {
  switch (q) {
    case BearingQuality::Undetectable: return "undetectable";
    case BearingQuality::Ambiguous: return "ambiguous";
    case BearingQuality::Ok: return "ok";
  }
  return "?";
}

namespace {

constexpr double kMissing = -std::numeric_limits<double>::infinity();

double value_at(const SweepProfile& p, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(p.mean_dbm.size());
  if (p.circular) {
    i = ((i % n) + n) % n;
  } else if (i < 0 || i >= n) {
    return kMissing;
  }
  const double v = p.mean_dbm[static_cast<std::size_t>(i)];
  return std::isnan(v) ? kMissing : v;
}

double angular_gap(double a, double b) { return std::abs(wrap_180(a - b)); }

}  // namespace

std::vector<std::size_t> local_maxima(const SweepProfile& p) {
  std::vector<std::size_t> out;
  const auto n = static_cast<std::ptrdiff_t>(p.mean_dbm.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double v = value_at(p, i);
    if (v == kMissing) {
      continue;
    }
    // Plateaus count once, at their first index.
    if (v > value_at(p, i - 1) && v >= value_at(p, i + 1)) {
      out.push_back(static_cast<std::size_t>(i));
    }
  }
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return p.mean_dbm[a] > p.mean_dbm[b]; });
  return out;
}

BearingMeasurement estimate_bearing(const SweepProfile& p, const BearingOptions& opt) {
  if (p.empty() || p.mean_dbm.size() != p.angles_deg.size()) {
    throw EmptyProfileError("sweep profile has no samples");
  }
  BearingMeasurement m;
  m.sniffer = p.sniffer;
  std::vector<double> valid;
  std::size_t peak = 0;
  double best = kMissing;
  for (std::size_t i = 0; i < p.mean_dbm.size(); ++i) {
    if (std::isnan(p.mean_dbm[i])) {
      continue;
    }
    valid.push_back(p.mean_dbm[i]);
    if (p.mean_dbm[i] > best) {
      best = p.mean_dbm[i];
      peak = i;
    }
  }
  m.peak_dbm = best;
  m.snr_db = best - median(valid);
  if (best - p.noise_floor_dbm < opt.detection_margin_db) {
    m.quality = BearingQuality::Undetectable;
    return m;
  }
  const auto ip = static_cast<std::ptrdiff_t>(peak);
  const double y0 = value_at(p, ip - 1);
  const double y1 = best;
  const double y2 = value_at(p, ip + 1);
  double offset = 0.0;
  if (y0 != kMissing && y2 != kMissing) {
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom < 0.0) {
      offset = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
    }
  }
  const double raw = p.angles_deg[peak] + offset * p.step_deg;
  m.bearing_deg = p.circular ? wrap_360(raw) : raw;
  m.quality = BearingQuality::Ok;
  for (std::size_t i : local_maxima(p)) {
    if (i == peak) {
      continue;
    }
    if (p.mean_dbm[i] >= best - opt.ambiguity_db &&
        angular_gap(p.angles_deg[i], p.angles_deg[peak]) > 2.0 * opt.beamwidth_deg) {
      m.quality = BearingQuality::Ambiguous;
      break;
    }
  }
  return m;
}

}  // namespace ulsim::loc
