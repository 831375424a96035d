#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floorstitch/geom.h"
#include "floorstitch/posegraph.h"

namespace floorstitch {

struct RansacConfig {
  int n_hypotheses = 1000;
  double subset_frac = 2.0 / 3.0;
  // Position residual (meters, in the ground-truth frame) for an inlier.
  double inlier_threshold = 0.2;
  int max_refits = 20;
  uint64_t seed = 0;

  void Validate() const;
};

struct RansacResult {
  Sim2 transform;        // maps estimated positions into the gt frame
  std::vector<int> inliers;  // pano ids, ascending
  int best_hypothesis = -1;
};

// Fits gt ~ S(est) on positions. Every id in `est` must be present in `gt`.
// Throws ValidationError when est has fewer than 2 poses or an id is missing.
RansacResult AlignRansac(const PoseMap& est, const PoseMap& gt,
                         const RansacConfig& config = {});

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
};

struct PoseErrors {
  std::vector<int> ids;
  std::vector<double> rotation_deg;
  std::vector<double> translation_m;
  ErrorStats rotation;
  ErrorStats translation;
};

// Errors of S applied to every pose in `est` against `gt`. Throws
// ValidationError on an empty set or missing gt.
PoseErrors ComputePoseErrors(const PoseMap& est, const PoseMap& gt, const Sim2& s);

double Median(std::vector<double> values);

struct CcDistribution {
  std::vector<double> pdf;
  std::vector<double> cdf;
};

// Fraction of `total_panos` in each component (already sorted by size) and
// running sums.
CcDistribution ComputeCcDistribution(const std::vector<std::vector<int>>& components,
                                     size_t total_panos);

struct EvalReport {
  size_t total_panos = 0;
  size_t localized_panos = 0;
  double localization_pct = 0.0;
  // Absent when nothing was localized.
  std::optional<ErrorStats> rotation_deg;
  std::optional<ErrorStats> translation_m;
  size_t ransac_inliers = 0;
  double floorplan_iou = 0.0;
  CcDistribution cc;
};

// Deterministic JSON rendering (fixed key order, full precision).
std::string ReportToString(const EvalReport& report);

}  // namespace floorstitch
