#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "floorstitch/polygon.h"
#include "floorstitch/posegraph.h"
#include "floorstitch/scene.h"

namespace floorstitch {

struct RoomGroup {
  std::vector<int> members;  // ascending pano ids
  // World-frame room shape as a union of one polygon per member.
  std::vector<Polygon> polygons;
};

// Metric occupancy grid. Cell (r, c) covers
// [origin.x + c * cell_size, +cell_size) x [origin.y + r * cell_size, +cell_size);
// rows grow with y. The origin is always a multiple of cell_size so rasters
// of the same cell size share a lattice.
struct FloorplanRaster {
  double cell_size = 0.1;
  Vec2 origin = Vec2::Zero();
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> occupied;
  std::vector<int> label;  // -1 when unlabeled

  size_t Index(int r, int c) const { return static_cast<size_t>(r) * cols + c; }
  Vec2 CellCenter(int r, int c) const {
    return origin + Vec2((c + 0.5) * cell_size, (r + 0.5) * cell_size);
  }
  size_t OccupiedCount() const;
  double OccupiedArea() const {
    return static_cast<double>(OccupiedCount()) * cell_size * cell_size;
  }
  bool Empty() const { return OccupiedCount() == 0; }
};

// Area-based IoU of two simple polygons, integrated with exact spans along
// horizontal scanlines `step` apart.
double ContourIou(const Polygon& a, const Polygon& b, double step = 0.01);

// Connected components of the graph linking panoramas whose world-frame
// contours overlap with IoU > iou_threshold. Only panoramas present in
// `poses` take part. Groups are ordered by their smallest member.
std::vector<RoomGroup> GroupPanoramas(const Scene& scene, const PoseMap& poses,
                                      double iou_threshold = 0.25);

// World-frame polygon seen from `caster`: one ray per vertex of its own
// contour; on each ray, every member whose contour contains the caster
// offers its first crossing, with confidence interpolated along the crossed
// edge. The most confident offer wins, nearest on ties. Throws
// DegenerateInputError when fewer than three distinct vertices remain.
Polygon ExtractConfidentContour(const Scene& scene, const PoseMap& poses,
                                const std::vector<int>& members, int caster);

// Fills group.polygons with one extracted polygon per member.
void ExtractGroupContours(const Scene& scene, const PoseMap& poses,
                          RoomGroup* group);

// Rasterizes polygons; a cell is occupied when its center lies inside any of
// them, and labeled with the smallest index of a polygon containing it.
FloorplanRaster RasterizePolygons(const std::vector<Polygon>& polygons,
                                  double cell_size = 0.1);

// Union of all group polygons; labels are group indices.
FloorplanRaster Stitch(const std::vector<RoomGroup>& groups,
                       double cell_size = 0.1);

// |a and b| / |a or b| after aligning both rasters on their shared lattice.
// Zero when both are empty. Throws ValidationError on cell-size mismatch.
double FloorplanIou(const FloorplanRaster& a, const FloorplanRaster& b);

// Lossless exports: PGM occupancy (255 = occupied) and PPM with one color
// per room label. North (+y) is up.
std::string FloorplanToPgm(const FloorplanRaster& raster);
std::string FloorplanToPpm(const FloorplanRaster& raster);

// Vector drawing of group contours plus every posed panorama's W/D/O
// segments (windows blue, doors red, openings green) and camera centers.
std::string FloorplanToSvg(const std::vector<RoomGroup>& groups,
                           const Scene& scene, const PoseMap& poses);

}  // namespace floorstitch
