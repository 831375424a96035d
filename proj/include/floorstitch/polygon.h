#pragma once

#include <optional>
#include <span>
#include <vector>

#include "floorstitch/geom.h"

namespace floorstitch {

using Polygon = std::vector<Vec2>;

// Signed shoelace area; positive for counterclockwise vertex order.
double SignedArea(std::span<const Vec2> poly);
double Area(std::span<const Vec2> poly);

// Even-odd point containment. Points exactly on an edge may go either way.
bool PointInPolygon(std::span<const Vec2> poly, const Vec2& p);

// True when no two non-adjacent edges touch and no edge has zero length.
bool IsSimplePolygon(std::span<const Vec2> poly);

Polygon TransformPolygon(const Pose2& pose, std::span<const Vec2> poly);
Polygon TransformPolygon(const Sim2& sim, std::span<const Vec2> poly);

// Distance along the ray origin + t * dir (t > 0, dir unit) to its first
// crossing with the closed polyline, together with the edge index and the
// edge parameter in [0, 1] of the hit.
struct RayHit {
  double distance;
  size_t edge;
  double edge_param;
};
std::optional<RayHit> RaycastPolygon(std::span<const Vec2> poly,
                                     const Vec2& origin, const Vec2& dir);

// Axis-aligned bounds.
struct Box2 {
  Vec2 min;
  Vec2 max;
};
Box2 Bounds(std::span<const Vec2> poly);

}  // namespace floorstitch
