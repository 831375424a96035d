#include "floorstitch/geom.h"

#include <cmath>

#include <Eigen/LU>

#include "floorstitch/errors.h"

namespace floorstitch {

double WrapAngle(double angle) {
  if (angle > -kPi && angle <= kPi) return angle;
  double wrapped = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

double WrapPositive(double angle, double period) {
  double wrapped = std::fmod(angle, period);
  if (wrapped < 0.0) wrapped += period;
  if (wrapped >= period) wrapped = 0.0;
  return wrapped;
}

Mat2 Rotation2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Pose2::Pose2(double x, double y, double theta)
    : x_(x), y_(y), theta_(WrapAngle(theta)) {}

Pose2 Pose2::Inverse() const {
  const Vec2 t = -(rotation().transpose() * translation());
  return {t, -theta_};
}

Vec2 Pose2::operator*(const Vec2& p) const {
  return rotation() * p + translation();
}

Pose2 Pose2::operator*(const Pose2& other) const {
  return {(*this) * other.translation(), theta_ + other.theta_};
}

Mat3 Pose2::Adjoint() const {
  Mat3 adj = Mat3::Identity();
  adj.topLeftCorner<2, 2>() = rotation();
  adj(0, 2) = y_;
  adj(1, 2) = -x_;
  return adj;
}

Pose2 Compose(const Pose2& a, const Pose2& b) { return a * b; }

Pose2 Between(const Pose2& t_i, const Pose2& t_j) {
  return t_i.Inverse() * t_j;
}

namespace {

// sin(w)/w and (1 - cos(w))/w with series fallbacks near zero.
void SincTerms(double w, double* a, double* b) {
  if (std::abs(w) < 1e-6) {
    const double w2 = w * w;
    *a = 1.0 - w2 / 6.0;
    *b = w / 2.0 - w * w2 / 24.0;
  } else {
    const double s = std::sin(0.5 * w);
    *a = std::sin(w) / w;
    *b = 2.0 * s * s / w;
  }
}

}  // namespace

Pose2 Exp(const Twist2& xi) {
  double a, b;
  SincTerms(xi.omega, &a, &b);
  const double x = a * xi.vx - b * xi.vy;
  const double y = b * xi.vx + a * xi.vy;
  return {x, y, xi.omega};
}

Twist2 Log(const Pose2& pose) {
  const double w = pose.theta();
  const double half = 0.5 * w;
  // half * cot(half)
  const double hc =
      std::abs(w) < 1e-6 ? 1.0 - w * w / 12.0 : half / std::tan(half);
  const double vx = hc * pose.x() + half * pose.y();
  const double vy = -half * pose.x() + hc * pose.y();
  return {vx, vy, w};
}

Mat3 RightJacobian(const Twist2& xi) {
  const double w = xi.omega;
  const double r1 = xi.vx;
  const double r2 = xi.vy;
  Mat3 j = Mat3::Identity();
  double a, b;
  SincTerms(w, &a, &b);
  j(0, 0) = a;
  j(0, 1) = b;
  j(1, 0) = -b;
  j(1, 1) = a;
  // p = (w - sin w)/w^2, q = (1 - cos w)/w^2
  double p, q;
  if (std::abs(w) < 1e-3) {
    p = w / 6.0 - w * w * w / 120.0;
    q = 0.5 - w * w / 24.0;
  } else {
    const double h = std::sin(0.5 * w);
    p = (w - std::sin(w)) / (w * w);
    q = 2.0 * h * h / (w * w);
  }
  j(0, 2) = r1 * p - r2 * q;
  j(1, 2) = r1 * q + r2 * p;
  return j;
}

Mat3 RightJacobianInverse(const Twist2& xi) {
  return RightJacobian(xi).inverse();
}

Vec2 Sim2::operator*(const Vec2& p) const {
  return scale * (Rotation2(rotation) * p) + translation;
}

Sim2 Sim2::Inverse() const {
  Sim2 inv;
  inv.scale = 1.0 / scale;
  inv.rotation = WrapAngle(-rotation);
  inv.translation = -(inv.scale * (Rotation2(-rotation) * translation));
  return inv;
}

Pose2 Sim2::TransformPose(const Pose2& pose) const {
  return {(*this) * pose.translation(), pose.theta() + rotation};
}

Sim2 Compose(const Sim2& a, const Sim2& b) {
  Sim2 out;
  out.scale = a.scale * b.scale;
  out.rotation = WrapAngle(a.rotation + b.rotation);
  out.translation = a * b.translation;
  return out;
}

namespace {

struct Procrustes {
  double rotation;
  double scale;
  Vec2 src_mean;
  Vec2 dst_mean;
};

Procrustes SolveProcrustes(std::span<const Vec2> src,
                           std::span<const Vec2> dst) {
  if (src.size() != dst.size()) {
    throw DegenerateInputError("point set sizes differ");
  }
  if (src.size() < 2) {
    throw DegenerateInputError("need at least two point pairs");
  }
  const double n = static_cast<double>(src.size());
  Vec2 ms = Vec2::Zero();
  Vec2 md = Vec2::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    ms += src[i];
    md += dst[i];
  }
  ms /= n;
  md /= n;
  double dot = 0.0;
  double cross = 0.0;
  double src_var = 0.0;
  for (size_t i = 0; i < src.size(); ++i) {
    const Vec2 s = src[i] - ms;
    const Vec2 d = dst[i] - md;
    dot += s.dot(d);
    cross += s.x() * d.y() - s.y() * d.x();
    src_var += s.squaredNorm();
  }
  if (src_var <= 0.0) {
    throw DegenerateInputError("all source points coincide");
  }
  return {std::atan2(cross, dot), std::hypot(dot, cross) / src_var, ms, md};
}

}  // namespace

Sim2 FitSim2(std::span<const Vec2> src, std::span<const Vec2> dst) {
  const Procrustes p = SolveProcrustes(src, dst);
  Sim2 out;
  out.scale = p.scale;
  out.rotation = WrapAngle(p.rotation);
  out.translation = p.dst_mean - p.scale * (Rotation2(p.rotation) * p.src_mean);
  return out;
}

Pose2 FitRigid2(std::span<const Vec2> src, std::span<const Vec2> dst) {
  const Procrustes p = SolveProcrustes(src, dst);
  return {p.dst_mean - Rotation2(p.rotation) * p.src_mean, p.rotation};
}

SphericalAngles PixelToSpherical(const SphericalPixel& p) {
  SphericalAngles a;
  a.theta = p.u * (2.0 * kPi / (p.width - 1)) - kPi;
  a.phi = kPi * (1.0 - p.v / (p.height - 1)) - kPi / 2.0;
  return a;
}

Vec3 SphericalToRay(const SphericalAngles& a) {
  return {std::cos(a.phi) * std::sin(a.theta), std::sin(a.phi),
          std::cos(a.phi) * std::cos(a.theta)};
}

std::optional<Vec2> PixelToPlanePoint(const SphericalPixel& p,
                                      double plane_offset) {
  const Vec3 ray = SphericalToRay(PixelToSpherical(p));
  if (plane_offset == 0.0 || ray.y() == 0.0 ||
      std::signbit(ray.y()) != std::signbit(plane_offset)) {
    return std::nullopt;
  }
  const double s = plane_offset / ray.y();
  return Vec2(ray.x() * s, ray.z() * s);
}

std::optional<Vec2> PixelToFloorPoint(const SphericalPixel& p,
                                      double camera_height) {
  if (!(camera_height > 0.0)) {
    throw ConfigError("camera height must be positive");
  }
  return PixelToPlanePoint(p, -camera_height);
}

}  // namespace floorstitch
