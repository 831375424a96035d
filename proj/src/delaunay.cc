#include "floorstitch/delaunay.h"

#include <algorithm>
#include <numeric>

#include "floorstitch/errors.h"
#include "floorstitch/random.h"

namespace floorstitch {

int64_t Orient2d(const LatticePoint& a, const LatticePoint& b,
                 const LatticePoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int InCircleSign(const LatticePoint& a, const LatticePoint& b,
                 const LatticePoint& c, const LatticePoint& d) {
  using I = __int128;
  const I adx = a.x - d.x, ady = a.y - d.y;
  const I bdx = b.x - d.x, bdy = b.y - d.y;
  const I cdx = c.x - d.x, cdy = c.y - d.y;
  const I det = (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) +
                (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

namespace {

struct Triangle {
  // n[k] is the neighbor across the edge opposite v[k].
  std::array<int, 3> v;
  std::array<int, 3> n;
  bool alive;
};

class Triangulator {
 public:
  explicit Triangulator(std::span<const LatticePoint> input)
      : points_(input.begin(), input.end()), num_input_(input.size()) {}

  std::vector<std::array<int, 3>> Run() {
    if (num_input_ < 3) return {};
    AddSuperTriangle();
    std::vector<int> order(num_input_);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(0x5eed);
    rng.Shuffle(order);
    cavity_stamp_.assign(1, 0);
    by_start_.assign(points_.size(), -1);
    by_end_.assign(points_.size(), -1);
    for (int p : order) Insert(p);
    std::vector<std::array<int, 3>> out;
    const int first_super = static_cast<int>(num_input_);
    for (const Triangle& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= first_super || t.v[1] >= first_super ||
          t.v[2] >= first_super) {
        continue;
      }
      out.push_back(t.v);
    }
    return out;
  }

 private:
  void AddSuperTriangle() {
    int64_t min_x = points_[0].x, max_x = min_x;
    int64_t min_y = points_[0].y, max_y = min_y;
    for (const auto& p : points_) {
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
    const int64_t d = std::max(max_x - min_x, max_y - min_y) + 1;
    const int64_t cx = (min_x + max_x) / 2;
    const int64_t cy = (min_y + max_y) / 2;
    constexpr int64_t kLimit = int64_t{1} << 20;
    if (min_x < -kLimit || max_x > kLimit || min_y < -kLimit ||
        max_y > kLimit) {
      throw DegenerateInputError("lattice coordinates out of range");
    }
    const int64_t m = 1000 * d;
    const int s = static_cast<int>(points_.size());
    points_.push_back({cx - m, cy - d});
    points_.push_back({cx + m, cy - d});
    points_.push_back({cx, cy + m});
    tris_.push_back({{s, s + 1, s + 2}, {-1, -1, -1}, true});
    last_ = 0;
  }

  int Locate(int p) {
    const LatticePoint& q = points_[p];
    int t = last_;
    uint32_t salt = static_cast<uint32_t>(p) * 2654435761u;
    for (;;) {
      const Triangle& tri = tris_[t];
      const int start = static_cast<int>((salt >> 7) % 3);
      salt = salt * 1664525u + 1013904223u;
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const int k = (start + i) % 3;
        const LatticePoint& a = points_[tri.v[(k + 1) % 3]];
        const LatticePoint& b = points_[tri.v[(k + 2) % 3]];
        if (Orient2d(a, b, q) < 0) {
          next = tri.n[k];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
  }

  bool InCavity(int t, int p) const {
    const Triangle& tri = tris_[t];
    return InCircleSign(points_[tri.v[0]], points_[tri.v[1]],
                        points_[tri.v[2]], points_[p]) > 0;
  }

  int NewTriangle(const Triangle& t) {
    if (!free_.empty()) {
      const int idx = free_.back();
      free_.pop_back();
      tris_[idx] = t;
      return idx;
    }
    tris_.push_back(t);
    return static_cast<int>(tris_.size()) - 1;
  }

  void Insert(int p) {
    const int seed = Locate(p);
    ++stamp_;
    if (cavity_stamp_.size() < tris_.size()) cavity_stamp_.resize(tris_.size(), 0);
    std::vector<int>& cavity = cavity_;
    cavity.clear();
    boundary_.clear();
    cavity.push_back(seed);
    cavity_stamp_[seed] = stamp_;
    for (size_t i = 0; i < cavity.size(); ++i) {
      const int t = cavity[i];
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[t].n[k];
        if (nb >= 0 && cavity_stamp_[nb] == stamp_) continue;
        if (nb >= 0 && InCavity(nb, p)) {
          cavity_stamp_[nb] = stamp_;
          cavity.push_back(nb);
        } else {
          boundary_.push_back({t, k});
        }
      }
    }
    // Cavity slots are recycled only after the fan is built, since boundary
    // entries still reference them.
    std::vector<std::array<int, 3>> fan;  // (a, b, outer neighbor)
    fan.reserve(boundary_.size());
    for (const auto& [t, k] : boundary_) {
      const Triangle& tri = tris_[t];
      fan.push_back({tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], tri.n[k]});
    }
    for (int t : cavity) {
      tris_[t].alive = false;
      free_.push_back(t);
    }
    new_tris_.clear();
    for (const auto& [a, b, outer] : fan) {
      const int idx = NewTriangle({{a, b, p}, {-1, -1, outer}, true});
      new_tris_.push_back(idx);
      by_start_[a] = idx;
      by_end_[b] = idx;
      if (outer >= 0) {
        Triangle& o = tris_[outer];
        for (int k = 0; k < 3; ++k) {
          // The outer triangle's edge is (b, a) in its own winding.
          if (o.v[(k + 1) % 3] == b && o.v[(k + 2) % 3] == a) o.n[k] = idx;
        }
      }
    }
    for (int idx : new_tris_) {
      Triangle& t = tris_[idx];
      t.n[0] = by_start_[t.v[1]];  // edge (b, p)
      t.n[1] = by_end_[t.v[0]];    // edge (p, a)
    }
    for (int idx : new_tris_) {
      by_start_[tris_[idx].v[0]] = -1;
      by_end_[tris_[idx].v[1]] = -1;
    }
    if (cavity_stamp_.size() < tris_.size()) cavity_stamp_.resize(tris_.size(), 0);
    last_ = new_tris_.front();
  }

  std::vector<LatticePoint> points_;
  size_t num_input_;
  std::vector<Triangle> tris_;
  std::vector<int> free_;
  std::vector<uint32_t> cavity_stamp_;
  uint32_t stamp_ = 0;
  std::vector<int> cavity_;
  std::vector<std::pair<int, int>> boundary_;
  std::vector<int> new_tris_;
  std::vector<int> by_start_;
  std::vector<int> by_end_;
  int last_ = 0;
};

}  // namespace

std::vector<std::array<int, 3>> DelaunayTriangulate(
    std::span<const LatticePoint> points) {
  return Triangulator(points).Run();
}

}  // namespace floorstitch
