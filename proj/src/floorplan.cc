#include "floorstitch/floorplan.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "floorstitch/errors.h"
#include "floorstitch/image_io.h"

namespace floorstitch {

namespace {

// Even-odd inside spans of `poly` on the horizontal line at height y, as
// sorted disjoint [x0, x1) pairs.
std::vector<std::pair<double, double>> Spans(const Polygon& poly, double y) {
  std::vector<double> xs;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if ((a.y() > y) == (b.y() > y)) continue;
    xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
  }
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> spans;
  for (size_t k = 0; k + 1 < xs.size(); k += 2) spans.emplace_back(xs[k], xs[k + 1]);
  return spans;
}

double SpanLength(const std::vector<std::pair<double, double>>& s) {
  double total = 0.0;
  for (const auto& [x0, x1] : s) total += x1 - x0;
  return total;
}

double SpanOverlap(const std::vector<std::pair<double, double>>& a,
                   const std::vector<std::pair<double, double>>& b) {
  double total = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].first, b[j].first);
    const double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) total += hi - lo;
    if (a[i].second < b[j].second) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

}  // namespace

double ContourIou(const Polygon& a, const Polygon& b, double step) {
  if (a.size() < 3 || b.size() < 3) return 0.0;
  const Box2 ba = Bounds(a);
  const Box2 bb = Bounds(b);
  if (ba.max.x() <= bb.min.x() || bb.max.x() <= ba.min.x() ||
      ba.max.y() <= bb.min.y() || bb.max.y() <= ba.min.y()) {
    return 0.0;
  }
  const double y0 = std::min(ba.min.y(), bb.min.y());
  const double y1 = std::max(ba.max.y(), bb.max.y());
  double inter = 0.0, len_a = 0.0, len_b = 0.0;
  for (double y = y0 + 0.5 * step; y < y1; y += step) {
    const auto sa = Spans(a, y);
    const auto sb = Spans(b, y);
    inter += SpanOverlap(sa, sb);
    len_a += SpanLength(sa);
    len_b += SpanLength(sb);
  }
  const double uni = len_a + len_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<RoomGroup> GroupPanoramas(const Scene& scene, const PoseMap& poses,
                                      double iou_threshold) {
  std::vector<int> ids;
  std::vector<Polygon> world;
  for (const auto& [id, pose] : poses) {
    ids.push_back(id);
    world.push_back(TransformPolygon(pose, scene.Panorama(id).contour.vertices));
  }
  const size_t n = ids.size();
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a + 1; b < n; ++b) {
      if (find(a) == find(b)) continue;
      if (ContourIou(world[a], world[b]) > iou_threshold) {
        parent[std::max(find(a), find(b))] = std::min(find(a), find(b));
      }
    }
  }
  std::map<size_t, RoomGroup> by_root;
  for (size_t k = 0; k < n; ++k) by_root[find(k)].members.push_back(ids[k]);
  std::vector<RoomGroup> groups;
  for (auto& [root, g] : by_root) groups.push_back(std::move(g));
  std::sort(groups.begin(), groups.end(), [](const RoomGroup& x, const RoomGroup& y) {
    return x.members.front() < y.members.front();
  });
  return groups;
}

Polygon ExtractConfidentContour(const Scene& scene, const PoseMap& poses,
                                const std::vector<int>& members, int caster) {
  const Pose2& t_c = poses.at(caster);
  struct Member {
    Polygon poly;
    const std::vector<double>* confidence;
  };
  std::vector<Member> offers;
  for (int m : members) {
    const RoomContour& contour = scene.Panorama(m).contour;
    Polygon local = TransformPolygon(Between(t_c, poses.at(m)), contour.vertices);
    if (m != caster && !PointInPolygon(local, Vec2::Zero())) continue;
    offers.push_back({std::move(local), &contour.confidence});
  }

  Polygon out;
  for (const Vec2& v : scene.Panorama(caster).contour.vertices) {
    if (v.norm() < 1e-12) continue;
    const Vec2 dir = v.normalized();
    double best_conf = -1.0;
    double best_dist = 0.0;
    for (const Member& m : offers) {
      const auto hit = RaycastPolygon(m.poly, Vec2::Zero(), dir);
      if (!hit) continue;
      const auto& conf = *m.confidence;
      const double c = (1.0 - hit->edge_param) * conf[hit->edge] +
                       hit->edge_param * conf[(hit->edge + 1) % conf.size()];
      if (c > best_conf + 1e-12 ||
          (std::abs(c - best_conf) <= 1e-12 && hit->distance < best_dist)) {
        best_conf = c;
        best_dist = hit->distance;
      }
    }
    if (best_conf < 0.0) continue;
    const Vec2 p = t_c * Vec2(best_dist * dir);
    if (out.empty() || (p - out.back()).norm() > 1e-9) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-9) out.pop_back();
  if (out.size() < 3) {
    throw DegenerateInputError("extracted contour for panorama " +
                               std::to_string(caster) +
                               " has fewer than 3 distinct vertices");
  }
  return out;
}

void ExtractGroupContours(const Scene& scene, const PoseMap& poses,
                          RoomGroup* group) {
  group->polygons.clear();
  for (int m : group->members) {
    group->polygons.push_back(
        ExtractConfidentContour(scene, poses, group->members, m));
  }
}

size_t FloorplanRaster::OccupiedCount() const {
  return static_cast<size_t>(std::count(occupied.begin(), occupied.end(), 1));
}

FloorplanRaster RasterizePolygons(const std::vector<Polygon>& polygons,
                                  double cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("cell size must be positive");
  FloorplanRaster raster;
  raster.cell_size = cell_size;
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& poly : polygons) {
    if (poly.size() < 3) continue;
    const Box2 b = Bounds(poly);
    lo = lo.cwiseMin(b.min);
    hi = hi.cwiseMax(b.max);
  }
  if (!(lo.x() <= hi.x())) return raster;

  const double c0 = std::floor(lo.x() / cell_size);
  const double r0 = std::floor(lo.y() / cell_size);
  raster.origin = Vec2(c0 * cell_size, r0 * cell_size);
  raster.cols = std::max(1, static_cast<int>(std::ceil(hi.x() / cell_size) - c0));
  raster.rows = std::max(1, static_cast<int>(std::ceil(hi.y() / cell_size) - r0));
  raster.occupied.assign(static_cast<size_t>(raster.rows) * raster.cols, 0);
  raster.label.assign(raster.occupied.size(), -1);

  for (size_t p = 0; p < polygons.size(); ++p) {
    if (polygons[p].size() < 3) continue;
    for (int r = 0; r < raster.rows; ++r) {
      const double y = raster.origin.y() + (r + 0.5) * cell_size;
      for (const auto& [x0, x1] : Spans(polygons[p], y)) {
        const int cbeg = std::max(
            0, static_cast<int>(std::ceil((x0 - raster.origin.x()) / cell_size - 0.5)));
        const int cend = std::min(
            raster.cols,
            static_cast<int>(std::ceil((x1 - raster.origin.x()) / cell_size - 0.5)));
        for (int c = cbeg; c < cend; ++c) {
          const size_t idx = raster.Index(r, c);
          raster.occupied[idx] = 1;
          if (raster.label[idx] < 0) raster.label[idx] = static_cast<int>(p);
        }
      }
    }
  }
  return raster;
}

FloorplanRaster Stitch(const std::vector<RoomGroup>& groups, double cell_size) {
  std::vector<Polygon> polys;
  std::vector<int> owner;
  for (size_t g = 0; g < groups.size(); ++g) {
    for (const auto& p : groups[g].polygons) {
      polys.push_back(p);
      owner.push_back(static_cast<int>(g));
    }
  }
  FloorplanRaster raster = RasterizePolygons(polys, cell_size);
  // Polygons are appended in group order, so the smallest polygon index is
  // also the smallest group index.
  for (int& l : raster.label) {
    if (l >= 0) l = owner[l];
  }
  return raster;
}

double FloorplanIou(const FloorplanRaster& a, const FloorplanRaster& b) {
  if (std::abs(a.cell_size - b.cell_size) > 1e-12 * std::max(a.cell_size, 1.0)) {
    throw ValidationError("floorplan rasters have different cell sizes");
  }
  const double cs = a.cell_size;
  const long ar0 = std::lround(a.origin.y() / cs), ac0 = std::lround(a.origin.x() / cs);
  const long br0 = std::lround(b.origin.y() / cs), bc0 = std::lround(b.origin.x() / cs);
  size_t inter = 0;
  for (int r = 0; r < a.rows; ++r) {
    const long rb = ar0 + r - br0;
    if (rb < 0 || rb >= b.rows) continue;
    for (int c = 0; c < a.cols; ++c) {
      const long cb = ac0 + c - bc0;
      if (cb < 0 || cb >= b.cols) continue;
      if (a.occupied[a.Index(r, c)] &&
          b.occupied[b.Index(static_cast<int>(rb), static_cast<int>(cb))]) {
        ++inter;
      }
    }
  }
  const size_t uni = a.OccupiedCount() + b.OccupiedCount() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::string FloorplanToPgm(const FloorplanRaster& raster) {
  std::vector<uint8_t> gray(raster.occupied.size());
  for (int r = 0; r < raster.rows; ++r) {
    for (int c = 0; c < raster.cols; ++c) {
      gray[raster.Index(raster.rows - 1 - r, c)] =
          raster.occupied[raster.Index(r, c)] ? 255 : 0;
    }
  }
  return EncodePgm(raster.cols, raster.rows, gray);
}

std::string FloorplanToPpm(const FloorplanRaster& raster) {
  std::vector<uint8_t> rgb(raster.occupied.size() * 3, 0);
  for (int r = 0; r < raster.rows; ++r) {
    for (int c = 0; c < raster.cols; ++c) {
      const size_t src = raster.Index(r, c);
      uint8_t* px = &rgb[3 * raster.Index(raster.rows - 1 - r, c)];
      if (raster.label[src] >= 0) {
        LabelColor(raster.label[src], px);
      } else if (raster.occupied[src]) {
        px[0] = px[1] = px[2] = 200;
      }
    }
  }
  return EncodePpm(raster.cols, raster.rows, rgb);
}

namespace {

const char* KindColor(WdoKind kind) {
  switch (kind) {
    case WdoKind::kWindow:
      return "#1f4fd8";
    case WdoKind::kDoor:
      return "#d81f1f";
    case WdoKind::kOpening:
      return "#1f9d3a";
  }
  return "#000000";
}

}  // namespace

std::string FloorplanToSvg(const std::vector<RoomGroup>& groups,
                           const Scene& scene, const PoseMap& poses) {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = -lo;
  for (const auto& g : groups) {
    for (const auto& p : g.polygons) {
      const Box2 b = Bounds(p);
      lo = lo.cwiseMin(b.min);
      hi = hi.cwiseMax(b.max);
    }
  }
  for (const auto& [id, pose] : poses) {
    lo = lo.cwiseMin(pose.translation());
    hi = hi.cwiseMax(pose.translation());
  }
  if (!(lo.x() <= hi.x())) lo = hi = Vec2::Zero();
  const double margin = 0.5;
  lo -= Vec2::Constant(margin);
  hi += Vec2::Constant(margin);
  const double scale = 50.0;  // px per meter
  auto px = [&](const Vec2& p) {
    return Vec2((p.x() - lo.x()) * scale, (hi.y() - p.y()) * scale);
  };

  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << (hi.x() - lo.x()) * scale << "\" height=\"" << (hi.y() - lo.y()) * scale
      << "\">\n";
  for (size_t g = 0; g < groups.size(); ++g) {
    uint8_t rgb[3];
    LabelColor(static_cast<int>(g), rgb);
    for (const auto& poly : groups[g].polygons) {
      out << "  <polygon fill=\"rgb(" << int(rgb[0]) << ',' << int(rgb[1]) << ','
          << int(rgb[2]) << ")\" fill-opacity=\"0.25\" stroke=\"#333\" "
          << "stroke-width=\"1\" points=\"";
      for (const Vec2& v : poly) out << px(v).x() << ',' << px(v).y() << ' ';
      out << "\"/>\n";
    }
  }
  for (const auto& [id, pose] : poses) {
    for (const auto& w : scene.Panorama(id).wdos) {
      const Vec2 a = px(pose * w.e1);
      const Vec2 b = px(pose * w.e2);
      out << "  <line x1=\"" << a.x() << "\" y1=\"" << a.y() << "\" x2=\"" << b.x()
          << "\" y2=\"" << b.y() << "\" stroke=\"" << KindColor(w.kind)
          << "\" stroke-width=\"3\"/>\n";
    }
    const Vec2 c = px(pose.translation());
    out << "  <circle cx=\"" << c.x() << "\" cy=\"" << c.y()
        << "\" r=\"3\" fill=\"#000\"><title>pano " << id << "</title></circle>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace floorstitch
