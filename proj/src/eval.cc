#include "floorstitch/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "floorstitch/errors.h"
#include "floorstitch/random.h"

namespace floorstitch {

void RansacConfig::Validate() const {
  if (n_hypotheses < 1) throw ConfigError("ransac needs at least one hypothesis");
  if (!(subset_frac > 0.0 && subset_frac <= 1.0)) {
    throw ConfigError("ransac subset fraction must be in (0, 1]");
  }
  if (!(inlier_threshold > 0.0)) throw ConfigError("inlier threshold must be positive");
}

namespace {

struct Correspondences {
  std::vector<int> ids;
  std::vector<Vec2> src;
  std::vector<Vec2> dst;
};

Correspondences Pair(const PoseMap& est, const PoseMap& gt) {
  Correspondences c;
  for (const auto& [id, pose] : est) {
    const auto it = gt.find(id);
    if (it == gt.end()) {
      throw ValidationError("panorama " + std::to_string(id) +
                            " has no ground-truth pose");
    }
    c.ids.push_back(id);
    c.src.push_back(pose.translation());
    c.dst.push_back(it->second.translation());
  }
  return c;
}

std::vector<int> Inliers(const Correspondences& c, const Sim2& s, double threshold) {
  std::vector<int> out;
  for (size_t k = 0; k < c.src.size(); ++k) {
    if ((c.dst[k] - s * c.src[k]).norm() < threshold) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::optional<Sim2> FitSubset(const Correspondences& c, const std::vector<int>& idx) {
  std::vector<Vec2> src, dst;
  for (int k : idx) {
    src.push_back(c.src[k]);
    dst.push_back(c.dst[k]);
  }
  try {
    return FitSim2(src, dst);
  } catch (const DegenerateInputError&) {
    return std::nullopt;
  }
}

}  // namespace

RansacResult AlignRansac(const PoseMap& est, const PoseMap& gt,
                         const RansacConfig& config) {
  config.Validate();
  if (est.size() < 2) throw ValidationError("alignment needs at least 2 poses");
  const Correspondences c = Pair(est, gt);
  const int m = static_cast<int>(c.ids.size());
  const int k = std::clamp(static_cast<int>(std::ceil(config.subset_frac * m - 1e-9)), 2, m);

  // Subsets are drawn up front so scoring order cannot affect the stream.
  Rng rng(config.seed);
  std::vector<std::vector<int>> subsets(config.n_hypotheses);
  for (auto& s : subsets) s = rng.SampleIndices(m, k);

  RansacResult result;
  std::vector<int> best_inliers;
  for (int h = 0; h < config.n_hypotheses; ++h) {
    const auto s = FitSubset(c, subsets[h]);
    if (!s) continue;
    auto inl = Inliers(c, *s, config.inlier_threshold);
    if (result.best_hypothesis < 0 || inl.size() > best_inliers.size()) {
      result.best_hypothesis = h;
      result.transform = *s;
      best_inliers = std::move(inl);
    }
  }
  if (result.best_hypothesis < 0) {
    throw DegenerateInputError("every ransac subset was degenerate");
  }
  for (int it = 0; it < config.max_refits && best_inliers.size() >= 2; ++it) {
    const auto s = FitSubset(c, best_inliers);
    if (!s) break;
    auto inl = Inliers(c, *s, config.inlier_threshold);
    if (inl.size() < best_inliers.size()) break;
    result.transform = *s;
    if (inl == best_inliers) break;
    best_inliers = std::move(inl);
  }
  for (int idx : best_inliers) result.inliers.push_back(c.ids[idx]);
  return result;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

namespace {

ErrorStats Stats(const std::vector<double>& v) {
  return {std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()),
          Median(v)};
}

}  // namespace

PoseErrors ComputePoseErrors(const PoseMap& est, const PoseMap& gt, const Sim2& s) {
  if (est.empty()) throw ValidationError("pose errors over an empty set");
  PoseErrors out;
  for (const auto& [id, pose] : est) {
    const auto it = gt.find(id);
    if (it == gt.end()) {
      throw ValidationError("panorama " + std::to_string(id) +
                            " has no ground-truth pose");
    }
    const Pose2 aligned = s.TransformPose(pose);
    out.ids.push_back(id);
    out.translation_m.push_back((aligned.translation() - it->second.translation()).norm());
    out.rotation_deg.push_back(
        RadToDeg(std::abs(WrapAngle(aligned.theta() - it->second.theta()))));
  }
  out.rotation = Stats(out.rotation_deg);
  out.translation = Stats(out.translation_m);
  return out;
}

CcDistribution ComputeCcDistribution(const std::vector<std::vector<int>>& components,
                                     size_t total_panos) {
  CcDistribution d;
  if (total_panos == 0) return d;
  double running = 0.0;
  for (const auto& comp : components) {
    const double f = static_cast<double>(comp.size()) / static_cast<double>(total_panos);
    running += f;
    d.pdf.push_back(f);
    d.cdf.push_back(running);
  }
  return d;
}

std::string ReportToString(const EvalReport& r) {
  using nlohmann::ordered_json;
  auto stats = [](const std::optional<ErrorStats>& s) -> ordered_json {
    if (!s) return nullptr;
    return ordered_json{{"mean", s->mean}, {"median", s->median}};
  };
  ordered_json j;
  j["format"] = "floorstitch-eval";
  j["version"] = 1;
  j["total_panos"] = r.total_panos;
  j["localized_panos"] = r.localized_panos;
  j["localization_pct"] = r.localization_pct;
  j["rotation_error_deg"] = stats(r.rotation_deg);
  j["translation_error_m"] = stats(r.translation_m);
  j["ransac_inliers"] = r.ransac_inliers;
  j["floorplan_iou"] = r.floorplan_iou;
  j["cc_pdf"] = r.cc.pdf;
  j["cc_cdf"] = r.cc.cdf;
  return j.dump(2) + "\n";
}

}  // namespace floorstitch
