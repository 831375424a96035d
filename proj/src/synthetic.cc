#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>

#include "floorstitch/errors.h"
#include "floorstitch/random.h"
#include "floorstitch/scene.h"

namespace floorstitch {

namespace {

// Lattice directions. Index d also names the room side facing that way:
// rooms list sides counterclockwise starting at the bottom, so side index s
// faces kSideDir[s].
constexpr std::array<std::pair<int, int>, 4> kStep = {
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
// Counterclockwise travel direction along side s (bottom, right, top, left).
const std::array<Vec2, 4> kSideTravel = {Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0),
                                         Vec2(0, -1)};
// Lattice direction each side faces.
constexpr std::array<int, 4> kSideDir = {3, 0, 1, 2};

constexpr double kWallMargin = 0.35;
constexpr double kCameraClearance = 0.5;
constexpr double kCameraSpacing = 1.0;
constexpr double kChamferProb = 0.3;
constexpr double kWindowProb = 0.6;

struct Cell {
  int col;
  int row;
  int split_axis = -1;  // -1 none, 0 split along x, 1 along y
};

struct Room {
  int cell;
  double x0, y0, x1, y1;
  std::array<bool, 4> exterior{};
  std::array<double, 4> chamfer{};  // per corner, 0 = square

  // Corner k starts side k: BL, BR, TR, TL.
  Vec2 Corner(int k) const {
    switch (k) {
      case 0:
        return {x0, y0};
      case 1:
        return {x1, y0};
      case 2:
        return {x1, y1};
      default:
        return {x0, y1};
    }
  }
  // Position of side s along its wall line, as (fixed coordinate, lo, hi).
  void SideSpan(int s, double* fixed, double* lo, double* hi) const {
    if (s == 0 || s == 2) {
      *fixed = s == 0 ? y0 : y1;
      *lo = x0;
      *hi = x1;
    } else {
      *fixed = s == 1 ? x1 : x0;
      *lo = y0;
      *hi = y1;
    }
  }
  Polygon Outline() const {
    Polygon poly;
    for (int k = 0; k < 4; ++k) {
      const Vec2 p = Corner(k);
      const double c = chamfer[k];
      if (c > 0.0) {
        poly.push_back(p - c * kSideTravel[(k + 3) % 4]);
        poly.push_back(p + c * kSideTravel[k]);
      } else {
        poly.push_back(p);
      }
    }
    return poly;
  }
};

struct Feature {
  WdoKind kind;
  // Segment on a wall line; side index per participating room.
  Vec2 a, b;
  std::vector<std::pair<int, int>> rooms;  // (room index, side index)
};

Vec2 SidePoint(int side, double fixed, double along) {
  return (side == 0 || side == 2) ? Vec2(along, fixed) : Vec2(fixed, along);
}

class HomeBuilder {
 public:
  HomeBuilder(const SyntheticHomeConfig& config)
      : config_(config), rng_(config.seed) {}

  Scene Build() {
    GrowLattice();
    LayOutRooms();
    PlaceDoorsAndOpenings();
    PlaceChamfersAndWindows();
    return PlacePanoramas();
  }

 private:
  double ColumnWidth(int col) {
    auto it = col_width_.find(col);
    if (it != col_width_.end()) return it->second;
    return col_width_[col] = rng_.Uniform(3.0, 7.0);
  }
  double RowHeight(int row) {
    auto it = row_height_.find(row);
    if (it != row_height_.end()) return it->second;
    return row_height_[row] = rng_.Uniform(3.0, 6.5);
  }

  // Adds a cell and returns how many rooms it contributes.
  int AddCell(int col, int row, int remaining) {
    Cell cell{col, row};
    const double w = ColumnWidth(col);
    const double h = RowHeight(row);
    const bool can_split = config_.n_rooms >= 3 && remaining >= 2;
    if (can_split && std::max(w, h) > config_.split_threshold) {
      cell.split_axis = w >= h ? 0 : 1;
    }
    cell_at_[{col, row}] = static_cast<int>(cells_.size());
    cells_.push_back(cell);
    return cell.split_axis >= 0 ? 2 : 1;
  }

  void GrowLattice() {
    int remaining = config_.n_rooms;
    remaining -= AddCell(0, 0, remaining);
    while (remaining > 0) {
      std::vector<std::pair<int, int>> frontier;  // (cell, direction)
      for (int i = 0; i < static_cast<int>(cells_.size()); ++i) {
        for (int d = 0; d < 4; ++d) {
          const int c = cells_[i].col + kStep[d].first;
          const int r = cells_[i].row + kStep[d].second;
          if (!cell_at_.count({c, r})) frontier.emplace_back(i, d);
        }
      }
      const auto [parent, dir] =
          frontier[rng_.UniformInt(0, static_cast<int>(frontier.size()) - 1)];
      const int col = cells_[parent].col + kStep[dir].first;
      const int row = cells_[parent].row + kStep[dir].second;
      const int child = static_cast<int>(cells_.size());
      remaining -= AddCell(col, row, remaining);
      tree_links_.emplace_back(parent, child);
    }
  }

  void LayOutRooms() {
    std::map<int, double> col_x, row_y;
    double x = 0.0;
    for (const auto& [col, w] : col_width_) {
      col_x[col] = x;
      x += w;
    }
    double y = 0.0;
    for (const auto& [row, h] : row_height_) {
      row_y[row] = y;
      y += h;
    }
    for (int i = 0; i < static_cast<int>(cells_.size()); ++i) {
      const Cell& c = cells_[i];
      const double x0 = col_x[c.col];
      const double y0 = row_y[c.row];
      const double x1 = x0 + col_width_[c.col];
      const double y1 = y0 + row_height_[c.row];
      cell_rooms_.emplace_back();
      auto add = [&](double a0, double b0, double a1, double b1) {
        Room room{i, a0, b0, a1, b1};
        cell_rooms_.back().push_back(static_cast<int>(rooms_.size()));
        rooms_.push_back(room);
      };
      if (c.split_axis == 0) {
        const double xm = 0.5 * (x0 + x1);
        add(x0, y0, xm, y1);
        add(xm, y0, x1, y1);
      } else if (c.split_axis == 1) {
        const double ym = 0.5 * (y0 + y1);
        add(x0, y0, x1, ym);
        add(x0, ym, x1, y1);
      } else {
        add(x0, y0, x1, y1);
      }
    }
    for (Room& room : rooms_) {
      const Cell& c = cells_[room.cell];
      for (int s = 0; s < 4; ++s) {
        const int d = kSideDir[s];
        if (!OnCellBoundary(room, s)) continue;
        room.exterior[s] =
            !cell_at_.count({c.col + kStep[d].first, c.row + kStep[d].second});
      }
    }
  }

  bool OnCellBoundary(const Room& room, int side) const {
    const Cell& c = cells_[room.cell];
    if (c.split_axis == 0 && (side == 1 || side == 3)) {
      // Split line is x = mid; the side is on the boundary unless it is the
      // split line.
      const Room& first = rooms_[cell_rooms_[room.cell][0]];
      const double mid = first.x1;
      return side == 1 ? room.x1 != mid : room.x0 != mid;
    }
    if (c.split_axis == 1 && (side == 0 || side == 2)) {
      const Room& first = rooms_[cell_rooms_[room.cell][0]];
      const double mid = first.y1;
      return side == 2 ? room.y1 != mid : room.y0 != mid;
    }
    return true;
  }

  // Places a feature of the given width range on the shared interval
  // [lo, hi] of a wall line.
  void PlaceShared(WdoKind kind, double w_lo, double w_hi, int room_a,
                   int side_a, int room_b, int side_b, double lo, double hi) {
    double fixed, unused_lo, unused_hi;
    rooms_[room_a].SideSpan(side_a, &fixed, &unused_lo, &unused_hi);
    const double avail = hi - lo - 2.0 * kWallMargin;
    const double width = std::min(rng_.Uniform(w_lo, w_hi), avail);
    const double center =
        rng_.Uniform(lo + kWallMargin + width / 2, hi - kWallMargin - width / 2);
    Feature f{kind, SidePoint(side_a, fixed, center - width / 2),
              SidePoint(side_a, fixed, center + width / 2),
              {{room_a, side_a}, {room_b, side_b}}};
    features_.push_back(std::move(f));
  }

  void ConnectCells(int cell_a, int cell_b) {
    const Cell& a = cells_[cell_a];
    const Cell& b = cells_[cell_b];
    int dir = -1;
    for (int d = 0; d < 4; ++d) {
      if (a.col + kStep[d].first == b.col && a.row + kStep[d].second == b.row) {
        dir = d;
      }
    }
    const int side_a = static_cast<int>(
        std::find(kSideDir.begin(), kSideDir.end(), dir) - kSideDir.begin());
    const int side_b = (side_a + 2) % 4;
    int best_a = -1, best_b = -1;
    double best_lo = 0, best_hi = 0;
    for (int ra : cell_rooms_[cell_a]) {
      if (!OnCellBoundary(rooms_[ra], side_a)) continue;
      for (int rb : cell_rooms_[cell_b]) {
        if (!OnCellBoundary(rooms_[rb], side_b)) continue;
        double fa, la, ha, fb, lb, hb;
        rooms_[ra].SideSpan(side_a, &fa, &la, &ha);
        rooms_[rb].SideSpan(side_b, &fb, &lb, &hb);
        const double lo = std::max(la, lb);
        const double hi = std::min(ha, hb);
        if (best_a < 0 || hi - lo > best_hi - best_lo) {
          best_a = ra;
          best_b = rb;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }
    PlaceShared(WdoKind::kDoor, 0.8, 1.1, best_a, side_a, best_b, side_b,
                best_lo, best_hi);
  }

  void PlaceDoorsAndOpenings() {
    for (const auto& [a, b] : tree_links_) ConnectCells(a, b);
    // Extra doors between adjacent cells not already linked create loops.
    for (int a = 0; a < static_cast<int>(cells_.size()); ++a) {
      for (int d : {0, 1}) {
        auto it = cell_at_.find(
            {cells_[a].col + kStep[d].first, cells_[a].row + kStep[d].second});
        if (it == cell_at_.end()) continue;
        const int b = it->second;
        const bool linked =
            std::any_of(tree_links_.begin(), tree_links_.end(), [&](auto l) {
              return (l.first == a && l.second == b) ||
                     (l.first == b && l.second == a);
            });
        if (linked) continue;
        if (rng_.Bernoulli(config_.extra_door_prob)) ConnectCells(a, b);
      }
    }
    for (int c = 0; c < static_cast<int>(cells_.size()); ++c) {
      if (cells_[c].split_axis < 0) continue;
      const int ra = cell_rooms_[c][0];
      const int rb = cell_rooms_[c][1];
      const int side_a = cells_[c].split_axis == 0 ? 1 : 2;
      double fixed, lo, hi;
      rooms_[ra].SideSpan(side_a, &fixed, &lo, &hi);
      PlaceShared(WdoKind::kOpening, 1.2, 3.0, ra, side_a, rb,
                  (side_a + 2) % 4, lo, hi);
    }
  }

  void PlaceChamfersAndWindows() {
    for (int r = 0; r < static_cast<int>(rooms_.size()); ++r) {
      Room& room = rooms_[r];
      if (config_.non_manhattan) {
        for (int k = 0; k < 4; ++k) {
          if (room.exterior[(k + 3) % 4] && room.exterior[k] &&
              rng_.Bernoulli(kChamferProb)) {
            room.chamfer[k] = rng_.Uniform(0.4, 0.9);
          }
        }
      }
      std::vector<int> exterior_sides;
      std::vector<int> chosen;
      for (int s = 0; s < 4; ++s) {
        if (!room.exterior[s]) continue;
        exterior_sides.push_back(s);
        if (rng_.Bernoulli(kWindowProb)) chosen.push_back(s);
      }
      if (chosen.empty() && !exterior_sides.empty()) {
        chosen.push_back(exterior_sides[rng_.UniformInt(
            0, static_cast<int>(exterior_sides.size()) - 1)]);
      }
      for (int s : chosen) {
        double fixed, lo, hi;
        room.SideSpan(s, &fixed, &lo, &hi);
        // Chamfer at the side's start and end corners, in travel order.
        const double c_start = room.chamfer[s];
        const double c_end = room.chamfer[(s + 1) % 4];
        const bool forward = kSideTravel[s].sum() > 0;
        const double lo_cut = forward ? c_start : c_end;
        const double hi_cut = forward ? c_end : c_start;
        const double a = lo + lo_cut + kWallMargin;
        const double b = hi - hi_cut - kWallMargin;
        const double width = std::min(rng_.Uniform(0.6, 1.8), b - a);
        if (width < 0.6) continue;
        const double center = rng_.Uniform(a + width / 2, b - width / 2);
        features_.push_back({WdoKind::kWindow,
                             SidePoint(s, fixed, center - width / 2),
                             SidePoint(s, fixed, center + width / 2),
                             {{r, s}}});
      }
    }
  }

  Vec2 SampleCamera(const Polygon& outline, const Room& room,
                    const std::vector<Vec2>& taken) {
    Vec2 fallback(0.5 * (room.x0 + room.x1), 0.5 * (room.y0 + room.y1));
    for (int attempt = 0; attempt < 500; ++attempt) {
      const Vec2 p(rng_.Uniform(room.x0 + kCameraClearance,
                                room.x1 - kCameraClearance),
                   rng_.Uniform(room.y0 + kCameraClearance,
                                room.y1 - kCameraClearance));
      if (!PointInPolygon(outline, p)) continue;
      bool clear = true;
      for (size_t i = 0; i < outline.size() && clear; ++i) {
        const Vec2& a = outline[i];
        const Vec2& b = outline[(i + 1) % outline.size()];
        const double t =
            std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        clear = (a + t * (b - a) - p).norm() >= kCameraClearance;
      }
      for (const Vec2& q : taken) {
        if ((q - p).norm() < kCameraSpacing) clear = false;
      }
      if (clear) return p;
    }
    return fallback;
  }

  Scene PlacePanoramas() {
    Scene scene;
    std::vector<Polygon> outlines;
    for (const Room& room : rooms_) outlines.push_back(room.Outline());
    int next_id = 0;
    for (int r = 0; r < static_cast<int>(rooms_.size()); ++r) {
      const int count =
          rng_.UniformInt(config_.min_panos_per_room, config_.max_panos_per_room);
      std::vector<Vec2> taken;
      for (int k = 0; k < count; ++k) {
        const Vec2 position = SampleCamera(outlines[r], rooms_[r], taken);
        taken.push_back(position);
        const Pose2 gt(position, rng_.Uniform(-kPi, kPi));
        const Pose2 world_to_pano = gt.Inverse();
        PanoramaRecord pano;
        pano.id = next_id++;
        pano.gt_pose = gt;
        pano.gt_room = r;
        pano.camera_height = rng_.Uniform(1.45, 1.65);
        pano.vanishing_angle = WrapPositive(gt.theta(), kPi / 2.0);
        pano.contour.vertices = TransformPolygon(world_to_pano, outlines[r]);
        pano.contour.confidence.assign(outlines[r].size(), 1.0);
        for (const Feature& f : features_) {
          for (const auto& [room_index, side] : f.rooms) {
            if (room_index != r) continue;
            const bool ordered = (f.b - f.a).dot(kSideTravel[side]) > 0.0;
            WdoDetection d;
            d.kind = f.kind;
            d.e1 = world_to_pano * (ordered ? f.a : f.b);
            d.e2 = world_to_pano * (ordered ? f.b : f.a);
            const Vec2 dir = (d.e2 - d.e1).normalized();
            d.interior_normal = Vec2(-dir.y(), dir.x());
            pano.wdos.push_back(d);
          }
        }
        scene.panoramas.push_back(std::move(pano));
      }
    }
    scene.gt_floorplan = std::move(outlines);
    return scene;
  }

  const SyntheticHomeConfig& config_;
  Rng rng_;
  std::vector<Cell> cells_;
  std::map<std::pair<int, int>, int> cell_at_;
  std::map<int, double> col_width_;
  std::map<int, double> row_height_;
  std::vector<std::pair<int, int>> tree_links_;
  std::vector<std::vector<int>> cell_rooms_;
  std::vector<Room> rooms_;
  std::vector<Feature> features_;
};

}  // namespace

Scene GenerateSyntheticHome(const SyntheticHomeConfig& config) {
  if (config.n_rooms < 1) throw ConfigError("n_rooms must be at least 1");
  if (config.min_panos_per_room < 1 ||
      config.max_panos_per_room < config.min_panos_per_room ||
      config.max_panos_per_room > 3) {
    throw ConfigError("panos per room must satisfy 1 <= min <= max <= 3");
  }
  if (!(config.split_threshold > 0.0)) {
    throw ConfigError("split_threshold must be positive");
  }
  if (!(config.extra_door_prob >= 0.0 && config.extra_door_prob <= 1.0)) {
    throw ConfigError("extra_door_prob must lie in [0, 1]");
  }
  return HomeBuilder(config).Build();
}

}  // namespace floorstitch
