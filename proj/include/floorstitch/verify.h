#pragma once

#include <memory>
#include <vector>

#include "floorstitch/bev.h"
#include "floorstitch/hypotheses.h"
#include "floorstitch/scene.h"

namespace floorstitch {

enum class VerifierSource { kOracle, kXcorr };

struct VerifierDecision {
  double score = 0.0;
  bool accept = false;
  VerifierSource source = VerifierSource::kOracle;
};

struct VerifierConfig {
  // Oracle operating point and supervision tolerances.
  double accept_threshold = 0.93;
  double rot_tol_door_window = DegToRad(7.0);
  double rot_tol_opening = DegToRad(9.0);
  // L-infinity translation tolerance in camera-height units.
  double trans_tol_linf = 0.35;
  // Cross-correlation verifier. The threshold is a tuning knob.
  double xcorr_threshold = 0.8;
  size_t xcorr_min_overlap = 200;

  // Throws ConfigError. Thresholds above one are allowed and reject all.
  void Validate() const;
};

// Accepts (score 1) iff the hypothesis is within the rotation tolerance for
// its kind and within trans_tol_linf of the ground-truth relative pose after
// dividing by `camera_height`.
VerifierDecision OracleVerify(const AlignmentHypothesis& h, const Pose2& gt_i,
                              const Pose2& gt_j, double camera_height,
                              const VerifierConfig& config = {});

struct BevPair {
  DenseBev floor;
  DenseBev ceiling;
};

BevPair RenderBevPair(const PanoramaRecord& pano, const TextureFn& floor,
                      const TextureFn& ceiling, const BevConfig& config = {});

// Normalized cross-correlation between two reliable, occupied grids under
// the relative pose; pairs are gathered in both directions so the score is
// symmetric. Returns 0 when fewer than `min_overlap` pairs exist or either
// side has no variance. Negative correlations clamp to 0.
double SurfaceCorrelation(const DenseBev& a, const DenseBev& b,
                          const Pose2& i_T_j, size_t min_overlap);

// Mean of floor and ceiling correlations.
VerifierDecision XcorrVerify(const AlignmentHypothesis& h, const BevPair& bev_i,
                             const BevPair& bev_j,
                             const VerifierConfig& config = {});

// Scores hypotheses. Implementations must be safe to call concurrently.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerifierDecision Verify(const AlignmentHypothesis& h) const = 0;
};

class OracleVerifier : public Verifier {
 public:
  // Throws MissingGroundTruthError when a panorama lacks gt_pose.
  OracleVerifier(const Scene& scene, VerifierConfig config);
  VerifierDecision Verify(const AlignmentHypothesis& h) const override;

 private:
  const Scene& scene_;
  VerifierConfig config_;
};

class XcorrVerifier : public Verifier {
 public:
  // Renders every panorama's floor and ceiling up front with procedural
  // world-keyed textures.
  XcorrVerifier(const Scene& scene, VerifierConfig config,
                const BevConfig& bev_config = {}, uint64_t texture_seed = 0);
  VerifierDecision Verify(const AlignmentHypothesis& h) const override;

 private:
  const BevPair& Bev(int pano_id) const;

  VerifierConfig config_;
  std::vector<int> ids_;
  std::vector<BevPair> bevs_;
};

struct ScoredHypothesis {
  AlignmentHypothesis hypothesis;
  VerifierDecision decision;
};

// Scores every hypothesis and returns the accepted ones in input order.
// Work is spread over `num_threads` (0 = hardware concurrency).
std::vector<ScoredHypothesis> VerifyAll(const std::vector<HypothesisSet>& sets,
                                        const Verifier& verifier,
                                        unsigned num_threads = 0);

}  // namespace floorstitch
