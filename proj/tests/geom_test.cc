#include "floorstitch/geom.h"

#include <gtest/gtest.h>

#include "floorstitch/errors.h"
#include "test_util.h"

namespace floorstitch {
namespace {

using testing::PoseNear;
using testing::RandomPose;

void ExpectPoseEq(const Pose2& a, const Pose2& b, double tol) {
  EXPECT_NEAR(a.x(), b.x(), tol);
  EXPECT_NEAR(a.y(), b.y(), tol);
  EXPECT_NEAR(WrapAngle(a.theta() - b.theta()), 0.0, tol);
}

TEST(WrapAngle, StaysInHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(WrapAngle(kPi), kPi);
  EXPECT_DOUBLE_EQ(WrapAngle(-kPi), kPi);
  EXPECT_NEAR(WrapAngle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(WrapAngle(2 * kPi + 0.25), 0.25, 1e-12);
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double a = WrapAngle(rng.Uniform(-100, 100));
    EXPECT_GT(a, -kPi);
    EXPECT_LE(a, kPi);
  }
}

TEST(WrapPositive, ReducesIntoPeriod) {
  EXPECT_NEAR(WrapPositive(-0.1, kPi / 2), kPi / 2 - 0.1, 1e-12);
  EXPECT_NEAR(WrapPositive(kPi / 2 + 0.1, kPi / 2), 0.1, 1e-12);
  EXPECT_EQ(WrapPositive(0.0, kPi / 2), 0.0);
}

TEST(Pose2, ThetaIsWrappedOnConstruction) {
  EXPECT_NEAR(Pose2(0, 0, 3 * kPi / 2).theta(), -kPi / 2, 1e-12);
  EXPECT_DOUBLE_EQ(Pose2(0, 0, -kPi).theta(), kPi);
}

TEST(Compose, IdentityIsNeutral) {
  const Pose2 p(1.5, -2.0, 0.7);
  EXPECT_EQ(Compose(Pose2::Identity(), p), p);
  EXPECT_EQ(Compose(p, Pose2::Identity()), p);
}

TEST(Compose, QuarterTurnThenStep) {
  ExpectPoseEq(Compose(Pose2(1, 0, kPi / 2), Pose2(1, 0, 0)), Pose2(1, 1, kPi / 2),
               1e-15);
}

TEST(Compose, GroupAxiomsOnRandomPoses) {
  Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    const Pose2 a = RandomPose(rng), b = RandomPose(rng), c = RandomPose(rng);
    ExpectPoseEq(Compose(a, a.Inverse()), Pose2::Identity(), 1e-12);
    ExpectPoseEq(Compose(a.Inverse(), a), Pose2::Identity(), 1e-12);
    ExpectPoseEq(Compose(Compose(a, b), c), Compose(a, Compose(b, c)), 1e-12);
  }
}

TEST(Compose, ActsOnPointsConsistently) {
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const Pose2 a = RandomPose(rng), b = RandomPose(rng);
    const Vec2 p(rng.Uniform(-3, 3), rng.Uniform(-3, 3));
    EXPECT_LT(((a * b) * p - a * (b * p)).norm(), 1e-12);
  }
}

TEST(Between, Examples) {
  const Pose2 p(3, -1, 2.0);
  ExpectPoseEq(Between(p, p), Pose2::Identity(), 1e-15);
  ExpectPoseEq(Between(Pose2::Identity(), p), p, 1e-15);
  ExpectPoseEq(Between(Pose2(2, 0, 0), Pose2(2, 1, kPi / 2)), Pose2(0, 1, kPi / 2),
               1e-15);
}

TEST(ExpLog, RoundTrip) {
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const Pose2 p(rng.Uniform(-5, 5), rng.Uniform(-5, 5),
                  rng.Uniform(-kPi + 1e-6, kPi - 1e-6));
    ExpectPoseEq(Exp(Log(p)), p, 1e-9);
    const Twist2 xi{rng.Uniform(-5, 5), rng.Uniform(-5, 5), rng.Uniform(-3, 3)};
    const Twist2 back = Log(Exp(xi));
    EXPECT_NEAR(back.vx, xi.vx, 1e-9);
    EXPECT_NEAR(back.vy, xi.vy, 1e-9);
    EXPECT_NEAR(back.omega, xi.omega, 1e-9);
  }
}

TEST(ExpLog, SmallAngleBranchIsContinuous) {
  for (double w : {1e-3, 1e-6, 1e-7, 1e-9, 0.0, -1e-8}) {
    const Twist2 xi{0.3, -0.2, w};
    const Pose2 p = Exp(xi);
    const Twist2 back = Log(p);
    EXPECT_NEAR(back.vx, 0.3, 1e-12);
    EXPECT_NEAR(back.vy, -0.2, 1e-12);
  }
}

// d/d(delta) Log(Exp(xi) * Exp(delta)) at 0 equals the inverse right Jacobian.
TEST(RightJacobian, MatchesFiniteDifferences) {
  Rng rng(11);
  for (double w : {0.8, -2.0, 1e-8, 3.0}) {
    const Twist2 xi{rng.Uniform(-2, 2), rng.Uniform(-2, 2), w};
    const Pose2 base = Exp(xi);
    Mat3 numeric;
    const double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d(c) = h;
      const Vec3 plus = Log(base * Exp(Twist2::FromVector(d))).AsVector();
      const Vec3 minus = Log(base * Exp(Twist2::FromVector(-d))).AsVector();
      numeric.col(c) = (plus - minus) / (2 * h);
    }
    EXPECT_LT((numeric - RightJacobianInverse(xi)).norm(), 1e-6) << "w=" << w;
    EXPECT_LT((RightJacobian(xi) * RightJacobianInverse(xi) - Mat3::Identity()).norm(),
              1e-12);
  }
}

// Ad(T) maps a twist at the body frame: T * Exp(xi) = Exp(Ad(T) xi) * T.
TEST(Adjoint, ConjugatesTwists) {
  Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    const Pose2 t = RandomPose(rng, 3);
    const Twist2 xi{rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1)};
    const Pose2 lhs = t * Exp(xi);
    const Pose2 rhs = Exp(Twist2::FromVector(t.Adjoint() * xi.AsVector())) * t;
    ExpectPoseEq(lhs, rhs, 1e-12);
  }
}

TEST(Sim2, InverseRoundTrip) {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Sim2 s{rng.Uniform(0.1, 5), rng.Uniform(-kPi, kPi),
                 Vec2(rng.Uniform(-5, 5), rng.Uniform(-5, 5))};
    const Vec2 p(rng.Uniform(-9, 9), rng.Uniform(-9, 9));
    EXPECT_LT((s.Inverse() * (s * p) - p).norm(), 1e-9);
    const Sim2 t{rng.Uniform(0.1, 5), rng.Uniform(-kPi, kPi), Vec2(1, 2)};
    EXPECT_LT((Compose(s, t) * p - s * (t * p)).norm(), 1e-9);
  }
}

TEST(FitSim2, IdentityOnEqualSets) {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {0, 2}, {-1, 3}};
  const Sim2 s = FitSim2(pts, pts);
  EXPECT_NEAR(s.scale, 1.0, 1e-12);
  EXPECT_NEAR(s.rotation, 0.0, 1e-12);
  EXPECT_LT(s.translation.norm(), 1e-12);
}

TEST(FitSim2, RecoversPlantedTransform) {
  const Sim2 planted{2.0, DegToRad(30), Vec2(1, 2)};
  Rng rng(5);
  std::vector<Vec2> src, dst;
  for (int k = 0; k < 10; ++k) {
    src.emplace_back(rng.Uniform(-4, 4), rng.Uniform(-4, 4));
    dst.push_back(planted * src.back());
  }
  const Sim2 s = FitSim2(src, dst);
  EXPECT_NEAR(s.scale, 2.0, 1e-9);
  EXPECT_NEAR(s.rotation, DegToRad(30), 1e-9);
  EXPECT_LT((s.translation - Vec2(1, 2)).norm(), 1e-9);
}

TEST(FitSim2, ThreePairsHaveNoResidual) {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Sim2 planted{rng.Uniform(0.2, 4), rng.Uniform(-kPi, kPi),
                       Vec2(rng.Uniform(-5, 5), rng.Uniform(-5, 5))};
    std::vector<Vec2> src, dst;
    for (int k = 0; k < 3; ++k) {
      src.emplace_back(rng.Uniform(-4, 4), rng.Uniform(-4, 4));
      dst.push_back(planted * src.back());
    }
    const Sim2 s = FitSim2(src, dst);
    for (int k = 0; k < 3; ++k) EXPECT_LT((s * src[k] - dst[k]).norm(), 1e-9);
  }
}

TEST(FitSim2, DegenerateInputs) {
  const std::vector<Vec2> one = {{1, 1}};
  EXPECT_THROW(FitSim2(one, one), DegenerateInputError);
  const std::vector<Vec2> same = {{1, 1}, {1, 1}, {1, 1}};
  const std::vector<Vec2> other = {{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(FitSim2(same, other), DegenerateInputError);
  EXPECT_THROW(FitSim2(other, one), DegenerateInputError);
}

TEST(FitRigid2, RecoversPose) {
  const Pose2 planted(0.5, -1.5, 2.5);
  std::vector<Vec2> src = {{0, 0}, {2, 0}, {1, 3}, {-2, 1}};
  std::vector<Vec2> dst;
  for (const auto& p : src) dst.push_back(planted * p);
  ExpectPoseEq(FitRigid2(src, dst), planted, 1e-12);
}

TEST(PixelToFloorPoint, NadirHitsBelowCamera) {
  const SphericalPixel p{512, 1023, 2048, 1024};
  const auto hit = PixelToFloorPoint(p, 1.7);
  ASSERT_TRUE(hit);
  EXPECT_LT(hit->norm(), 1e-12);
}

TEST(PixelToFloorPoint, HorizonAndAboveMiss) {
  EXPECT_FALSE(PixelToFloorPoint({100, 511.5, 2048, 1024}, 1.5));
  EXPECT_FALSE(PixelToFloorPoint({100, 10, 2048, 1024}, 1.5));
}

TEST(PixelToFloorPoint, FortyFiveDegreesDown) {
  const int w = 2049, h = 1025;
  const SphericalPixel p{3.0 * (w - 1) / 4.0, 3.0 * (h - 1) / 4.0, w, h};
  const SphericalAngles a = PixelToSpherical(p);
  EXPECT_NEAR(a.theta, kPi / 2, 1e-12);
  EXPECT_NEAR(a.phi, -kPi / 4, 1e-12);
  const auto hit = PixelToFloorPoint(p, 1.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(hit->norm(), 1.0, 1e-12);
  // Azimuth pi/2 points along +x of the (x, z) plane.
  EXPECT_NEAR(hit->x(), 1.0, 1e-12);
  EXPECT_NEAR(hit->y(), 0.0, 1e-12);
}

TEST(PixelToFloorPoint, DistanceGrowsTowardHorizon) {
  const int h = 1024;
  double last = -1.0;
  for (int v = h - 1; v > (h - 1) / 2; --v) {
    const auto hit = PixelToFloorPoint({300, static_cast<double>(v), 2048, h}, 1.6);
    ASSERT_TRUE(hit);
    EXPECT_GT(hit->norm(), last);
    last = hit->norm();
  }
}

TEST(PixelToFloorPoint, RejectsNonPositiveHeight) {
  EXPECT_THROW(PixelToFloorPoint({0, 1000, 2048, 1024}, 0.0), ConfigError);
}

}  // namespace
}  // namespace floorstitch
