#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "floorstitch/geom.h"
#include "floorstitch/scene.h"

namespace floorstitch {

// Top-down raster around a camera. The camera sits at the grid center, +x
// runs along columns and +y runs up (towards row 0).
struct BevGrid {
  int rows = 0;
  int cols = 0;
  double resolution = 0.02;  // meters per cell
  std::vector<float> intensity;
  std::vector<uint8_t> occupied;

  static BevGrid Empty(int rows, int cols, double resolution);

  size_t Index(int r, int c) const {
    return static_cast<size_t>(r) * cols + c;
  }
  Vec2 CellCenter(int r, int c) const;
  // Cell containing a room-frame point, if inside the grid.
  std::optional<std::pair<int, int>> CellOf(const Vec2& p) const;
  size_t OccupiedCount() const;

  bool operator==(const BevGrid&) const = default;
};

struct ReliabilityMask {
  int rows = 0;
  int cols = 0;
  int kernel_size = 11;
  std::vector<uint8_t> reliable;

  bool operator==(const ReliabilityMask&) const = default;
};

enum class BevSurface { kFloor, kCeiling };

// Maps a world-frame point to an intensity in [0, 1].
using TextureFn = std::function<double(const Vec2&)>;

struct BevConfig {
  double resolution = 0.02;
  double extent = 10.0;
  // Equirectangular sampling grid used for forward projection.
  int pano_width = 2048;
  int pano_height = 1024;
  // Floor samples must lie at least this far below the camera, ceiling
  // samples at least ceiling_min_rise above it.
  double floor_min_drop = 1.0;
  double ceiling_min_rise = 0.5;
  // Ceiling plane height above the camera for layout-based depth.
  double ceiling_rise = 1.2;
  int kernel_size = 11;

  int GridSize() const;
};

// Forward-projects the panorama's floor or ceiling onto a sparse BEV grid.
// Depth comes from the room layout; rays whose plane hit falls outside the
// contour are dropped. Rows are written bottom to top and later samples
// overwrite earlier ones in the same cell. Texture lookups use the world
// frame given by gt_pose (identity when absent).
BevGrid RenderBev(const PanoramaRecord& pano, BevSurface surface,
                  const TextureFn& texture, const BevConfig& config = {});

// Box-filter support test: a cell is reliable iff its K x K neighborhood
// (clipped at the border) holds at least one occupied cell.
ReliabilityMask ComputeReliabilityMask(const BevGrid& sparse, int kernel_size);

struct DenseBev {
  BevGrid grid;
  ReliabilityMask mask;
};

// Barycentric interpolation over a Delaunay triangulation of the occupied
// cells, zeroed wherever the reliability mask is false. Cells outside the
// samples' convex hull stay empty.
DenseBev Densify(const BevGrid& sparse, int kernel_size);

// Intersection over union of occupied cells after mapping b into a's frame
// with i_T_j (pose of b's camera in a's frame). The intersection is the mean
// of the a->b and b->a cell hit counts, which makes the measure symmetric.
double OverlapIou(const BevGrid& a, const BevGrid& b, const Pose2& i_T_j);

// Smooth value-noise texture keyed to world coordinates. Floor and ceiling
// use independent noise fields.
TextureFn ProceduralTexture(BevSurface surface, uint64_t seed = 0);

}  // namespace floorstitch
