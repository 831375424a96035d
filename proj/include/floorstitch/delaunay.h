#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace floorstitch {

struct LatticePoint {
  int64_t x;
  int64_t y;
};

// Delaunay triangulation of distinct integer points by incremental
// Bowyer-Watson insertion with exact predicates. Coordinates must stay within
// +-2^20. Returns counterclockwise index triples into `points`. Cocircular
// configurations are split arbitrarily; fully collinear input yields no
// triangles.
std::vector<std::array<int, 3>> DelaunayTriangulate(
    std::span<const LatticePoint> points);

// Exact orientation and in-circle tests used by the triangulator.
int64_t Orient2d(const LatticePoint& a, const LatticePoint& b,
                 const LatticePoint& c);
// Positive when d lies strictly inside the circumcircle of ccw (a, b, c).
int InCircleSign(const LatticePoint& a, const LatticePoint& b,
                 const LatticePoint& c, const LatticePoint& d);

}  // namespace floorstitch
