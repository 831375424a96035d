#include "floorstitch/hypotheses.h"

#include <algorithm>
#include <cmath>

namespace floorstitch {

bool PassesWidthRatio(double width_a, double width_b,
                      const HypothesisOptions& options) {
  const double hi = std::max(width_a, width_b);
  if (!(hi > 0.0)) return false;
  const double ratio = std::min(width_a, width_b) / hi;
  return ratio >= options.min_width_ratio && ratio <= options.max_width_ratio;
}

Pose2 AlignDetections(const WdoDetection& a, const WdoDetection& b,
                      HypothesisBranch branch) {
  const Vec2 da = a.e2 - a.e1;
  const Vec2 db = b.e2 - b.e1;
  double theta = std::atan2(da.y(), da.x()) - std::atan2(db.y(), db.x());
  if (branch == HypothesisBranch::kRotated) theta += kPi;
  const Vec2 t = a.Center() - Rotation2(theta) * b.Center();
  return {t, theta};
}

namespace {

bool SamePose(const Pose2& p, const Pose2& q, double tol) {
  return std::abs(p.x() - q.x()) < tol && std::abs(p.y() - q.y()) < tol &&
         std::abs(WrapAngle(p.theta() - q.theta())) < tol;
}

}  // namespace

HypothesisSet GenerateHypotheses(const PanoramaRecord& a,
                                 const PanoramaRecord& b,
                                 const HypothesisOptions& options) {
  HypothesisSet set{a.id, b.id, {}};
  for (size_t ka = 0; ka < a.wdos.size(); ++ka) {
    const WdoDetection& da = a.wdos[ka];
    for (size_t kb = 0; kb < b.wdos.size(); ++kb) {
      const WdoDetection& db = b.wdos[kb];
      if (da.kind != db.kind) continue;
      if (!PassesWidthRatio(da.Width(), db.Width(), options)) continue;
      for (HypothesisBranch branch :
           {HypothesisBranch::kIdentity, HypothesisBranch::kRotated}) {
        const Pose2 pose = AlignDetections(da, db, branch);
        // Windows only align with both interior normals facing the same way,
        // i.e. both cameras on the same side of the window.
        if (da.kind == WdoKind::kWindow &&
            da.interior_normal.dot(pose.rotation() * db.interior_normal) <=
                0.0) {
          continue;
        }
        const bool duplicate = std::any_of(
            set.hypotheses.begin(), set.hypotheses.end(), [&](const auto& h) {
              return SamePose(h.i_T_j, pose, options.duplicate_tol);
            });
        if (duplicate) continue;
        AlignmentHypothesis h;
        h.pano_i = a.id;
        h.pano_j = b.id;
        h.wdo_i = static_cast<int>(ka);
        h.wdo_j = static_cast<int>(kb);
        h.kind = da.kind;
        h.branch = branch;
        h.i_T_j = pose;
        set.hypotheses.push_back(h);
      }
    }
  }
  return set;
}

double AxisAlignCorrection(const AlignmentHypothesis& h,
                           const PanoramaRecord& a, const PanoramaRecord& b) {
  constexpr double kQuarter = kPi / 2.0;
  const double raw = (b.vanishing_angle - a.vanishing_angle) - h.i_T_j.theta();
  double r = raw - kQuarter * std::round(raw / kQuarter);
  if (r <= -kQuarter / 2.0) r += kQuarter;
  if (r > kQuarter / 2.0) r -= kQuarter;
  return r;
}

AlignmentHypothesis AxisAlign(const AlignmentHypothesis& h,
                              const PanoramaRecord& a, const PanoramaRecord& b,
                              const HypothesisOptions& options) {
  AlignmentHypothesis out = h;
  const double correction = AxisAlignCorrection(h, a, b);
  if (std::abs(correction) > options.axis_align_cap) {
    out.axis_aligned = false;
    return out;
  }
  out.axis_aligned = true;
  if (correction == 0.0) return out;
  // Rotate b's layout (in a's frame) about the matched detection's midpoint
  // and re-fit the rigid pose to the rotated point set.
  const Vec2 pivot = h.i_T_j * b.wdos.at(h.wdo_j).Center();
  const Mat2 rot = Rotation2(correction);
  const Polygon& src = b.contour.vertices;
  std::vector<Vec2> dst;
  dst.reserve(src.size());
  for (const Vec2& p : src) dst.push_back(pivot + rot * (h.i_T_j * p - pivot));
  out.i_T_j = FitRigid2(src, dst);
  return out;
}

std::vector<HypothesisSet> GenerateAllHypotheses(
    const Scene& scene, const HypothesisOptions& options) {
  std::vector<HypothesisSet> sets;
  const auto& panos = scene.panoramas;
  for (size_t i = 0; i < panos.size(); ++i) {
    for (size_t j = i + 1; j < panos.size(); ++j) {
      HypothesisSet set = GenerateHypotheses(panos[i], panos[j], options);
      if (set.hypotheses.empty()) continue;
      if (options.axis_align) {
        for (auto& h : set.hypotheses) h = AxisAlign(h, panos[i], panos[j], options);
      }
      sets.push_back(std::move(set));
    }
  }
  return sets;
}

}  // namespace floorstitch
