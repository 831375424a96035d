#include "floorstitch/polygon.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floorstitch {

double SignedArea(std::span<const Vec2> poly) {
  double twice = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double Area(std::span<const Vec2> poly) { return std::abs(SignedArea(poly)); }

bool PointInPolygon(std::span<const Vec2> poly, const Vec2& p) {
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross =
          a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

namespace {

double Orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool OnSegment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool SegmentsTouch(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                   const Vec2& q2) {
  const double d1 = Orient(q1, q2, p1);
  const double d2 = Orient(q1, q2, p2);
  const double d3 = Orient(p1, p2, q1);
  const double d4 = Orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && OnSegment(q1, q2, p1)) return true;
  if (d2 == 0 && OnSegment(q1, q2, p2)) return true;
  if (d3 == 0 && OnSegment(p1, p2, q1)) return true;
  if (d4 == 0 && OnSegment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

bool IsSimplePolygon(std::span<const Vec2> poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (SegmentsTouch(poly[i], poly[(i + 1) % n], poly[j],
                        poly[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

Polygon TransformPolygon(const Pose2& pose, std::span<const Vec2> poly) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) out.push_back(pose * p);
  return out;
}

Polygon TransformPolygon(const Sim2& sim, std::span<const Vec2> poly) {
  Polygon out;
  out.reserve(poly.size());
  for (const Vec2& p : poly) out.push_back(sim * p);
  return out;
}

std::optional<RayHit> RaycastPolygon(std::span<const Vec2> poly,
                                     const Vec2& origin, const Vec2& dir) {
  std::optional<RayHit> best;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2 e = poly[(i + 1) % poly.size()] - a;
    const double denom = dir.x() * e.y() - dir.y() * e.x();
    if (std::abs(denom) < 1e-15) continue;
    const Vec2 w = a - origin;
    const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
    const double s = (w.x() * dir.y() - w.y() * dir.x()) / denom;
    // Slack so rays aimed exactly at a vertex cannot slip between edges.
    if (t <= 0.0 || s < -1e-9 || s > 1.0 + 1e-9) continue;
    if (!best || t < best->distance) best = RayHit{t, i, std::clamp(s, 0.0, 1.0)};
  }
  return best;
}

Box2 Bounds(std::span<const Vec2> poly) {
  Box2 box{Vec2::Constant(std::numeric_limits<double>::infinity()),
           Vec2::Constant(-std::numeric_limits<double>::infinity())};
  for (const Vec2& p : poly) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

}  // namespace floorstitch
