#include "floorstitch/verify.h"

#include <gtest/gtest.h>

#include "floorstitch/errors.h"
#include "test_util.h"

namespace floorstitch {
namespace {

using testing::PanoInRoom;
using testing::Rect;

AlignmentHypothesis Hyp(WdoKind kind, const Pose2& i_T_j) {
  AlignmentHypothesis h;
  h.kind = kind;
  h.i_T_j = i_T_j;
  return h;
}

const Pose2 kGtI(1, 2, 0.3);
const Pose2 kGtJ(4, -1, 2.0);
const Pose2 kRel = Between(kGtI, kGtJ);

Pose2 Rotated(double deg) { return Pose2(kRel.translation(), kRel.theta() + DegToRad(deg)); }

TEST(OracleVerify, RotationToleranceDependsOnKind) {
  EXPECT_TRUE(OracleVerify(Hyp(WdoKind::kDoor, kRel), kGtI, kGtJ, 1.5).accept);
  EXPECT_FALSE(OracleVerify(Hyp(WdoKind::kDoor, Rotated(8)), kGtI, kGtJ, 1.5).accept);
  EXPECT_FALSE(OracleVerify(Hyp(WdoKind::kWindow, Rotated(-8)), kGtI, kGtJ, 1.5).accept);
  EXPECT_TRUE(OracleVerify(Hyp(WdoKind::kOpening, Rotated(8)), kGtI, kGtJ, 1.5).accept);
  EXPECT_TRUE(OracleVerify(Hyp(WdoKind::kDoor, Rotated(6.9)), kGtI, kGtJ, 1.5).accept);
  EXPECT_FALSE(OracleVerify(Hyp(WdoKind::kOpening, Rotated(9.5)), kGtI, kGtJ, 1.5).accept);
}

TEST(OracleVerify, TranslationInCameraHeights) {
  const double h = 1.6;
  const Pose2 far(kRel.translation() + Vec2(0.36 * h, 0), kRel.theta());
  const Pose2 near(kRel.translation() + Vec2(0.2 * h, -0.34 * h), kRel.theta());
  EXPECT_FALSE(OracleVerify(Hyp(WdoKind::kDoor, far), kGtI, kGtJ, h).accept);
  EXPECT_TRUE(OracleVerify(Hyp(WdoKind::kDoor, near), kGtI, kGtJ, h).accept);
  EXPECT_EQ(OracleVerify(Hyp(WdoKind::kDoor, far), kGtI, kGtJ, h).score, 0.0);
  EXPECT_EQ(OracleVerify(Hyp(WdoKind::kDoor, near), kGtI, kGtJ, h).score, 1.0);
}

TEST(OracleVerify, ThresholdAboveOneRejectsAll) {
  VerifierConfig cfg;
  cfg.accept_threshold = 1.0 + 1e-9;
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_FALSE(OracleVerify(Hyp(WdoKind::kDoor, kRel), kGtI, kGtJ, 1.5, cfg).accept);
}

TEST(VerifierConfig, RejectsBadValues) {
  VerifierConfig cfg;
  cfg.accept_threshold = -0.1;
  EXPECT_THROW(cfg.Validate(), ConfigError);
  cfg = {};
  cfg.trans_tol_linf = 0;
  EXPECT_THROW(cfg.Validate(), ConfigError);
}

TEST(OracleVerifier, NeedsGroundTruth) {
  Scene s;
  s.panoramas.push_back(PanoInRoom(0, Pose2::Identity(), Rect(-1, -1, 1, 1)));
  s.panoramas[0].gt_pose.reset();
  EXPECT_THROW(OracleVerifier(s, {}), MissingGroundTruthError);
  EXPECT_THROW(XcorrVerifier(s, {}), MissingGroundTruthError);
}

// Two cameras in one 4 x 3 room.
struct SameRoom {
  PanoramaRecord a = PanoInRoom(0, Pose2(1.2, 1.1, 0.4), Rect(0, 0, 4, 3));
  PanoramaRecord b = PanoInRoom(1, Pose2(2.9, 1.8, -2.2), Rect(0, 0, 4, 3));
  BevPair bev_a;
  BevPair bev_b;
  Pose2 rel = Between(*a.gt_pose, *b.gt_pose);

  SameRoom() {
    const auto floor = ProceduralTexture(BevSurface::kFloor, 1);
    const auto ceiling = ProceduralTexture(BevSurface::kCeiling, 1);
    bev_a = RenderBevPair(a, floor, ceiling);
    bev_b = RenderBevPair(b, floor, ceiling);
  }
};

const SameRoom& Fixture() {
  static const SameRoom* room = new SameRoom();
  return *room;
}

TEST(SurfaceCorrelation, SelfIsOne) {
  const auto& f = Fixture();
  EXPECT_GE(SurfaceCorrelation(f.bev_a.floor, f.bev_a.floor, Pose2::Identity(), 200), 0.99);
  EXPECT_GE(SurfaceCorrelation(f.bev_a.ceiling, f.bev_a.ceiling, Pose2::Identity(), 200),
            0.99);
}

TEST(SurfaceCorrelation, DisjointIsZero) {
  const auto& f = Fixture();
  EXPECT_EQ(SurfaceCorrelation(f.bev_a.floor, f.bev_b.floor, Pose2(9, 9, 0), 200), 0.0);
}

TEST(XcorrVerify, TruePoseBeatsWrongBranch) {
  const auto& f = Fixture();
  const auto good = XcorrVerify(Hyp(WdoKind::kDoor, f.rel), f.bev_a, f.bev_b);
  const Pose2 flipped = f.rel * Pose2(0, 0, kPi);
  const auto bad = XcorrVerify(Hyp(WdoKind::kDoor, flipped), f.bev_a, f.bev_b);
  EXPECT_EQ(good.source, VerifierSource::kXcorr);
  EXPECT_GT(good.score, 0.9);
  EXPECT_TRUE(good.accept);
  EXPECT_LT(bad.score, good.score - 0.3);
  EXPECT_FALSE(bad.accept);
}

TEST(XcorrVerify, SymmetricUnderSwap) {
  const auto& f = Fixture();
  Rng rng(3);
  for (int k = 0; k < 4; ++k) {
    const Pose2 t = f.rel * testing::RandomPose(rng, 0.3);
    const double ab = XcorrVerify(Hyp(WdoKind::kDoor, t), f.bev_a, f.bev_b).score;
    const double ba = XcorrVerify(Hyp(WdoKind::kDoor, t.Inverse()), f.bev_b, f.bev_a).score;
    EXPECT_NEAR(ab, ba, 1e-6);
  }
}

Scene Home(uint64_t seed) {
  SyntheticHomeConfig cfg;
  cfg.n_rooms = 6;
  cfg.max_panos_per_room = 2;
  cfg.seed = seed;
  return GenerateSyntheticHome(cfg);
}

TEST(VerifyAll, EmptyInput) {
  const Scene s = Home(1);
  EXPECT_TRUE(VerifyAll({}, OracleVerifier(s, {})).empty());
}

TEST(VerifyAll, AcceptsOnlyConsistentHypotheses) {
  const Scene s = Home(2);
  const auto sets = GenerateAllHypotheses(s);
  const auto accepted = VerifyAll(sets, OracleVerifier(s, {}), 1);
  ASSERT_FALSE(accepted.empty());
  size_t total = 0;
  for (const auto& set : sets) total += set.hypotheses.size();
  EXPECT_LT(accepted.size(), total);
  for (const auto& sh : accepted) {
    const Pose2 gt = Between(*s.Panorama(sh.hypothesis.pano_i).gt_pose,
                             *s.Panorama(sh.hypothesis.pano_j).gt_pose);
    EXPECT_TRUE(testing::PoseNear(sh.hypothesis.i_T_j, gt, 1e-6));
    EXPECT_EQ(sh.decision.score, 1.0);
  }
}

TEST(VerifyAll, SameResultForAnyThreadCount) {
  const Scene s = Home(5);
  const auto sets = GenerateAllHypotheses(s);
  const OracleVerifier v(s, {});
  const auto one = VerifyAll(sets, v, 1);
  for (unsigned t : {2u, 4u, 0u}) {
    const auto many = VerifyAll(sets, v, t);
    ASSERT_EQ(many.size(), one.size());
    for (size_t k = 0; k < one.size(); ++k) {
      EXPECT_EQ(many[k].hypothesis.pano_i, one[k].hypothesis.pano_i);
      EXPECT_EQ(many[k].hypothesis.pano_j, one[k].hypothesis.pano_j);
      EXPECT_EQ(many[k].hypothesis.i_T_j, one[k].hypothesis.i_T_j);
    }
  }
}

class Throwing : public Verifier {
 public:
  VerifierDecision Verify(const AlignmentHypothesis&) const override {
    throw NumericalError("boom", 0);
  }
};

TEST(VerifyAll, PropagatesErrors) {
  const Scene s = Home(3);
  EXPECT_THROW(VerifyAll(GenerateAllHypotheses(s), Throwing(), 3), NumericalError);
}

}  // namespace
}  // namespace floorstitch
