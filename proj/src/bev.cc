#include "floorstitch/bev.h"

#include <algorithm>
#include <cmath>

#include "floorstitch/delaunay.h"
#include "floorstitch/errors.h"
#include "floorstitch/polygon.h"

namespace floorstitch {

BevGrid BevGrid::Empty(int rows, int cols, double resolution) {
  BevGrid g;
  g.rows = rows;
  g.cols = cols;
  g.resolution = resolution;
  g.intensity.assign(static_cast<size_t>(rows) * cols, 0.0f);
  g.occupied.assign(static_cast<size_t>(rows) * cols, 0);
  return g;
}

Vec2 BevGrid::CellCenter(int r, int c) const {
  return {(c + 0.5) * resolution - 0.5 * cols * resolution,
          0.5 * rows * resolution - (r + 0.5) * resolution};
}

std::optional<std::pair<int, int>> BevGrid::CellOf(const Vec2& p) const {
  const double fc = std::floor((p.x() + 0.5 * cols * resolution) / resolution);
  const double fr = std::floor((0.5 * rows * resolution - p.y()) / resolution);
  if (!(fc >= 0 && fc < cols && fr >= 0 && fr < rows)) return std::nullopt;
  return std::pair<int, int>(static_cast<int>(fr), static_cast<int>(fc));
}

size_t BevGrid::OccupiedCount() const {
  return static_cast<size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

int BevConfig::GridSize() const {
  return static_cast<int>(std::lround(extent / resolution));
}

BevGrid RenderBev(const PanoramaRecord& pano, BevSurface surface,
                  const TextureFn& texture, const BevConfig& config) {
  if (!(pano.camera_height > 0.0)) {
    throw ConfigError("camera height must be positive");
  }
  const int n = config.GridSize();
  BevGrid grid = BevGrid::Empty(n, n, config.resolution);
  const double plane = surface == BevSurface::kFloor ? -pano.camera_height
                                                     : config.ceiling_rise;
  if (surface == BevSurface::kFloor && pano.camera_height < config.floor_min_drop) {
    return grid;
  }
  if (surface == BevSurface::kCeiling && config.ceiling_rise < config.ceiling_min_rise) {
    return grid;
  }
  const Pose2 to_world = pano.gt_pose.value_or(Pose2::Identity());
  const Polygon& contour = pano.contour.vertices;
  SphericalPixel px{0, 0, config.pano_width, config.pano_height};
  for (int v = config.pano_height - 1; v >= 0; --v) {
    px.v = v;
    for (int u = 0; u < config.pano_width; ++u) {
      px.u = u;
      const std::optional<Vec2> hit = PixelToPlanePoint(px, plane);
      if (!hit || !PointInPolygon(contour, *hit)) continue;
      const auto cell = grid.CellOf(*hit);
      if (!cell) continue;
      const size_t idx = grid.Index(cell->first, cell->second);
      grid.intensity[idx] =
          static_cast<float>(std::clamp(texture(to_world * *hit), 0.0, 1.0));
      grid.occupied[idx] = 1;
    }
  }
  return grid;
}

ReliabilityMask ComputeReliabilityMask(const BevGrid& sparse, int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ConfigError("kernel size must be a positive odd integer");
  }
  const int rows = sparse.rows;
  const int cols = sparse.cols;
  // Summed-area table with a zero border row and column.
  std::vector<int> sat(static_cast<size_t>(rows + 1) * (cols + 1), 0);
  auto at = [&](int r, int c) -> int& {
    return sat[static_cast<size_t>(r) * (cols + 1) + c];
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      at(r + 1, c + 1) = sparse.occupied[sparse.Index(r, c)] + at(r, c + 1) +
                         at(r + 1, c) - at(r, c);
    }
  }
  ReliabilityMask mask{rows, cols, kernel_size,
                       std::vector<uint8_t>(static_cast<size_t>(rows) * cols, 0)};
  const int half = kernel_size / 2;
  for (int r = 0; r < rows; ++r) {
    const int r0 = std::max(0, r - half);
    const int r1 = std::min(rows, r + half + 1);
    for (int c = 0; c < cols; ++c) {
      const int c0 = std::max(0, c - half);
      const int c1 = std::min(cols, c + half + 1);
      const int sum = at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
      mask.reliable[sparse.Index(r, c)] = sum > 0;
    }
  }
  return mask;
}

DenseBev Densify(const BevGrid& sparse, int kernel_size) {
  DenseBev out;
  out.mask = ComputeReliabilityMask(sparse, kernel_size);
  BevGrid& dense = out.grid;
  dense = BevGrid::Empty(sparse.rows, sparse.cols, sparse.resolution);

  std::vector<LatticePoint> samples;
  std::vector<float> values;
  for (int r = 0; r < sparse.rows; ++r) {
    for (int c = 0; c < sparse.cols; ++c) {
      const size_t idx = sparse.Index(r, c);
      if (!sparse.occupied[idx]) continue;
      samples.push_back({c, r});
      values.push_back(sparse.intensity[idx]);
      dense.intensity[idx] = sparse.intensity[idx];
      dense.occupied[idx] = 1;
    }
  }
  for (const auto& tri : DelaunayTriangulate(samples)) {
    const LatticePoint& a = samples[tri[0]];
    const LatticePoint& b = samples[tri[1]];
    const LatticePoint& c = samples[tri[2]];
    const int64_t area = Orient2d(a, b, c);
    if (area <= 0) continue;
    const int64_t x0 = std::min({a.x, b.x, c.x});
    const int64_t x1 = std::max({a.x, b.x, c.x});
    const int64_t y0 = std::min({a.y, b.y, c.y});
    const int64_t y1 = std::max({a.y, b.y, c.y});
    for (int64_t y = y0; y <= y1; ++y) {
      for (int64_t x = x0; x <= x1; ++x) {
        const LatticePoint q{x, y};
        const int64_t wa = Orient2d(b, c, q);
        const int64_t wb = Orient2d(c, a, q);
        const int64_t wc = Orient2d(a, b, q);
        if (wa < 0 || wb < 0 || wc < 0) continue;
        const size_t idx = sparse.Index(static_cast<int>(y), static_cast<int>(x));
        if (sparse.occupied[idx]) continue;
        const double value = (static_cast<double>(wa) * values[tri[0]] +
                              static_cast<double>(wb) * values[tri[1]] +
                              static_cast<double>(wc) * values[tri[2]]) /
                             static_cast<double>(area);
        dense.intensity[idx] = static_cast<float>(value);
        dense.occupied[idx] = 1;
      }
    }
  }
  for (size_t i = 0; i < dense.occupied.size(); ++i) {
    if (!out.mask.reliable[i]) {
      dense.intensity[i] = 0.0f;
      dense.occupied[i] = 0;
    }
  }
  return out;
}

namespace {

// Counts occupied cells of `from` whose centers, mapped by `from_to_onto`,
// land on occupied cells of `onto`.
size_t CountHits(const BevGrid& from, const BevGrid& onto,
                 const Pose2& from_to_onto) {
  size_t hits = 0;
  for (int r = 0; r < from.rows; ++r) {
    for (int c = 0; c < from.cols; ++c) {
      if (!from.occupied[from.Index(r, c)]) continue;
      const auto cell = onto.CellOf(from_to_onto * from.CellCenter(r, c));
      if (cell && onto.occupied[onto.Index(cell->first, cell->second)]) ++hits;
    }
  }
  return hits;
}

}  // namespace

double OverlapIou(const BevGrid& a, const BevGrid& b, const Pose2& i_T_j) {
  if (a.resolution != b.resolution) {
    throw ConfigError("BEV grids must share a resolution");
  }
  const double ab = static_cast<double>(CountHits(b, a, i_T_j));
  const double ba = static_cast<double>(CountHits(a, b, i_T_j.Inverse()));
  const double inter = 0.5 * (ab + ba);
  const double uni =
      static_cast<double>(a.OccupiedCount() + b.OccupiedCount()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

double LatticeNoise(int64_t ix, int64_t iy, uint64_t seed) {
  uint64_t h = seed * 0x9E3779B97F4A7C15ull;
  h ^= static_cast<uint64_t>(ix) * 0xBF58476D1CE4E5B9ull;
  h ^= static_cast<uint64_t>(iy) * 0x94D049BB133111EBull;
  h ^= h >> 31;
  h *= 0xD6E8FEB86659FD93ull;
  h ^= h >> 32;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double ValueNoise(const Vec2& p, double scale, uint64_t seed) {
  const double x = p.x() / scale;
  const double y = p.y() / scale;
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int64_t ix = static_cast<int64_t>(fx);
  const int64_t iy = static_cast<int64_t>(fy);
  auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
  const double tx = smooth(x - fx);
  const double ty = smooth(y - fy);
  const double v00 = LatticeNoise(ix, iy, seed);
  const double v10 = LatticeNoise(ix + 1, iy, seed);
  const double v01 = LatticeNoise(ix, iy + 1, seed);
  const double v11 = LatticeNoise(ix + 1, iy + 1, seed);
  return (v00 * (1 - tx) + v10 * tx) * (1 - ty) +
         (v01 * (1 - tx) + v11 * tx) * ty;
}

}  // namespace

TextureFn ProceduralTexture(BevSurface surface, uint64_t seed) {
  const uint64_t base = seed * 2 + (surface == BevSurface::kFloor ? 1 : 2);
  return [base](const Vec2& p) {
    return 0.6 * ValueNoise(p, 0.35, base) + 0.4 * ValueNoise(p, 0.12, base + 7);
  };
}

}  // namespace floorstitch
