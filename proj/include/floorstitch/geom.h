#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace floorstitch {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double DegToRad(double deg) { return deg * kPi / 180.0; }
inline constexpr double RadToDeg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into (-pi, pi].
double WrapAngle(double angle);

// Reduces an angle modulo `period` into [0, period).
double WrapPositive(double angle, double period);

Mat2 Rotation2(double theta);

// Element of se(2): translational velocity (vx, vy) and angular rate omega.
struct Twist2 {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Vec3 AsVector() const { return {vx, vy, omega}; }
  static Twist2 FromVector(const Vec3& v) { return {v(0), v(1), v(2)}; }
};

// Rigid motion in the plane. theta is kept in (-pi, pi].
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double theta);
  Pose2(const Vec2& t, double theta) : Pose2(t.x(), t.y(), theta) {}

  static Pose2 Identity() { return {}; }

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 translation() const { return {x_, y_}; }
  Mat2 rotation() const { return Rotation2(theta_); }

  Pose2 Inverse() const;
  Vec2 operator*(const Vec2& p) const;
  Pose2 operator*(const Pose2& other) const;

  // 3x3 adjoint in (vx, vy, omega) ordering.
  Mat3 Adjoint() const;

  bool operator==(const Pose2&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

Pose2 Compose(const Pose2& a, const Pose2& b);

// Relative pose of t_j expressed in the frame of t_i: inverse(t_i) * t_j.
Pose2 Between(const Pose2& t_i, const Pose2& t_j);

Pose2 Exp(const Twist2& xi);
Twist2 Log(const Pose2& pose);

// Right Jacobian of the SE(2) exponential and its inverse, (vx, vy, omega)
// ordering.
Mat3 RightJacobian(const Twist2& xi);
Mat3 RightJacobianInverse(const Twist2& xi);

// Planar similarity p -> scale * R(rotation) * p + translation.
struct Sim2 {
  double scale = 1.0;
  double rotation = 0.0;
  Vec2 translation = Vec2::Zero();

  static Sim2 Identity() { return {}; }

  Vec2 operator*(const Vec2& p) const;
  Sim2 Inverse() const;
  // Applies the similarity to a pose: rotation adds, position is mapped.
  Pose2 TransformPose(const Pose2& pose) const;
};

Sim2 Compose(const Sim2& a, const Sim2& b);

// Least-squares similarity minimizing sum ||dst_i - S(src_i)||^2.
// Throws DegenerateInputError when fewer than two pairs are given or all
// source points coincide.
Sim2 FitSim2(std::span<const Vec2> src, std::span<const Vec2> dst);

// Same, with the scale pinned to one.
Pose2 FitRigid2(std::span<const Vec2> src, std::span<const Vec2> dst);

// Equirectangular pixel. u indexes columns, v indexes rows.
struct SphericalPixel {
  double u = 0.0;
  double v = 0.0;
  int width = 0;
  int height = 0;
};

struct SphericalAngles {
  double theta = 0.0;  // azimuth in [-pi, pi]
  double phi = 0.0;    // elevation in [-pi/2, pi/2], positive above horizon
};

SphericalAngles PixelToSpherical(const SphericalPixel& p);

// Unit ray (x, y, z) with y pointing up.
Vec3 SphericalToRay(const SphericalAngles& angles);

// Intersects the pixel's viewing ray with a horizontal plane at signed
// vertical offset `plane_offset` from the camera (negative = below). Returns
// the horizontal coordinates (x, z) of the hit, or nothing if the ray never
// reaches that plane.
std::optional<Vec2> PixelToPlanePoint(const SphericalPixel& p,
                                      double plane_offset);

// Floor intersection for a camera mounted `camera_height` above the floor.
std::optional<Vec2> PixelToFloorPoint(const SphericalPixel& p,
                                      double camera_height);

}  // namespace floorstitch
