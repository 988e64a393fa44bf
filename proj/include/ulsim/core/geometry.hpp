#pragma once

#include <cmath>

namespace ulsim {

// Planar coordinates in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline bool is_finite(const Position& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double distance(const Position& a, const Position& b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Direction from `from` to `to` in degrees, counter-clockwise from +x, in [0, 360).
double bearing_deg(const Position& from, const Position& to);

/// Wraps an angle into [0, 360).
double wrap_360(double deg);

/// Wraps an angle into [-180, 180).
double wrap_180(double deg);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace ulsim
