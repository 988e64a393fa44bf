#include "ulsim/core/geometry.hpp"

#include <cmath>

namespace ulsim {

double wrap_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) {
    r += 360.0;
  }
  if (r >= 360.0) {
    r -= 360.0;
  }
  return r;
}

double wrap_180(double deg) {
  double r = wrap_360(deg + 180.0) - 180.0;
  return r;
}

double bearing_deg(const Position& from, const Position& to) {
  return wrap_360(rad_to_deg(std::atan2(to.y - from.y, to.x - from.x)));
}

}  // namespace ulsim
