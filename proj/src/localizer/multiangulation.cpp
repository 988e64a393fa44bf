#include "ulsim/localizer/multiangulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulsim/core/errors.hpp"

namespace ulsim::loc {

namespace {

struct Ray {
  Position p;
  double ux;
  double uy;
};

Ray ray_of(const BearingMeasurement& b) {
  if (!b.bearing_deg) {
    throw ConfigError("bearing measurement has no bearing");
  }
  const double r = deg_to_rad(*b.bearing_deg);
  return Ray{b.sniffer, std::cos(r), std::sin(r)};
}

Position at(const Ray& r, double t) { return {r.p.x + t * r.ux, r.p.y + t * r.uy}; }

double project(const Ray& r, const Position& q) {
  return std::max(0.0, (q.x - r.p.x) * r.ux + (q.y - r.p.y) * r.uy);
}

}  // namespace

LocationEstimate multiangulate(const BearingMeasurement& b1, const BearingMeasurement& b2, double min_crossing_deg) {
  const Ray r1 = ray_of(b1);
  const Ray r2 = ray_of(b2);
  if (distance(r1.p, r2.p) == 0.0) {
    throw GeometryError("sniffers are coincident");
  }
  const double diff = std::abs(wrap_180(*b1.bearing_deg - *b2.bearing_deg));
  const double crossing = std::min(diff, 180.0 - diff);
  if (crossing < min_crossing_deg) {
    throw IllConditionedError("bearings cross at " + std::to_string(crossing) + " deg");
  }
  // Solve p1 + t u1 = p2 + s u2.
  const double det = r1.ux * (-r2.uy) - r1.uy * (-r2.ux);
  const double dx = r2.p.x - r1.p.x;
  const double dy = r2.p.y - r1.p.y;
  double t = (dx * (-r2.uy) - dy * (-r2.ux)) / det;
  double s = (r1.ux * dy - r1.uy * dx) / det;
  if (t < 0.0 || s < 0.0) {
    // Crossing lies behind a sniffer: fall back to the closest ray points.
    const double cand_t[3] = {0.0, project(r1, r2.p), 0.0};
    const double cand_s[3] = {project(r2, r1.p), 0.0, 0.0};
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      const double d = distance(at(r1, cand_t[i]), at(r2, cand_s[i]));
      if (d < best) {
        best = d;
        t = cand_t[i];
        s = cand_s[i];
      }
    }
  }
  const Position a = at(r1, t);
  const Position b = at(r2, s);
  LocationEstimate est;
  est.position = {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
  est.residual_m = distance(a, b) / 2.0;
  est.bearings = {b1, b2};
  return est;
}

LocationEstimate multiangulate(std::span<const BearingMeasurement> bearings, double min_crossing_deg) {
  if (bearings.size() < 2) {
    throw ConfigError("multiangulation needs at least two bearings");
  }
  LocationEstimate out;
  int used = 0;
  for (std::size_t i = 0; i < bearings.size(); ++i) {
    for (std::size_t j = i + 1; j < bearings.size(); ++j) {
      try {
        const LocationEstimate e = multiangulate(bearings[i], bearings[j], min_crossing_deg);
        out.position.x += e.position.x;
        out.position.y += e.position.y;
        out.residual_m += e.residual_m;
        ++used;
      } catch (const IllConditionedError&) {
      }
    }
  }
  if (used == 0) {
    throw IllConditionedError("every bearing pair is ill-conditioned");
  }
  out.position.x /= used;
  out.position.y /= used;
  out.residual_m /= used;
  out.bearings.assign(bearings.begin(), bearings.end());
  return out;
}

double localization_error(const LocationEstimate& est, const Position& truth) { return distance(est.position, truth); }

}  // namespace ulsim::loc
