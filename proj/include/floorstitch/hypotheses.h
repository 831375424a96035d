#pragma once

#include <vector>

#include "floorstitch/geom.h"
#include "floorstitch/scene.h"

namespace floorstitch {

// Which rotation branch produced a hypothesis: endpoints paired e1<->e1
// (kIdentity) or e1<->e2 (kRotated, a further half turn).
enum class HypothesisBranch { kIdentity, kRotated };

struct AlignmentHypothesis {
  int pano_i = 0;
  int pano_j = 0;
  int wdo_i = 0;
  int wdo_j = 0;
  WdoKind kind = WdoKind::kDoor;
  HypothesisBranch branch = HypothesisBranch::kIdentity;
  // Pose of panorama j expressed in panorama i's room frame.
  Pose2 i_T_j;
  bool axis_aligned = false;
};

struct HypothesisSet {
  int pano_i = 0;
  int pano_j = 0;
  std::vector<AlignmentHypothesis> hypotheses;
};

struct HypothesisOptions {
  double min_width_ratio = 0.65;
  double max_width_ratio = 1.0;
  // Hypotheses whose poses agree to this tolerance are merged.
  double duplicate_tol = 1e-6;
  bool axis_align = true;
  double axis_align_cap = DegToRad(15.0);
};

// min(w1, w2) / max(w1, w2) within the configured interval (inclusive).
bool PassesWidthRatio(double width_a, double width_b,
                      const HypothesisOptions& options = {});

// Pose of b's panorama in a's frame that lands b's center on a's center with
// b's extent along a's (kIdentity) or reversed (kRotated).
Pose2 AlignDetections(const WdoDetection& a, const WdoDetection& b,
                      HypothesisBranch branch);

HypothesisSet GenerateHypotheses(const PanoramaRecord& a,
                                 const PanoramaRecord& b,
                                 const HypothesisOptions& options = {});

// Refines the relative rotation of `h` with the two panoramas' vanishing
// angles. Corrections larger than options.axis_align_cap leave h untouched
// (with axis_aligned = false).
AlignmentHypothesis AxisAlign(const AlignmentHypothesis& h,
                              const PanoramaRecord& a, const PanoramaRecord& b,
                              const HypothesisOptions& options = {});

// Correction angle before capping, reduced into (-pi/4, pi/4].
double AxisAlignCorrection(const AlignmentHypothesis& h,
                           const PanoramaRecord& a, const PanoramaRecord& b);

// Every unordered panorama pair (i < j by position in the scene), with axis
// alignment applied when enabled. Pairs without hypotheses are omitted.
std::vector<HypothesisSet> GenerateAllHypotheses(
    const Scene& scene, const HypothesisOptions& options = {});

}  // namespace floorstitch
