#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "sixd/rng.hpp"

namespace sixd {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

using PointCloud = std::vector<Vec3>;

/// Hamilton convention, scalar first, canonicalized to w >= 0
/// (q and -q denote the same rotation).
struct UnitQuaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static UnitQuaternion identity() { return {}; }

  /// Normalizes an arbitrary 4-vector. Throws if its norm is ~0.
  static UnitQuaternion normalized(double w, double x, double y, double z);

  static UnitQuaternion from_matrix(const Mat3& r);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  UnitQuaternion conjugate() const { return {w, -x, -y, -z}; }

  /// Rotation angle from identity, in [0, pi].
  double angle() const;

  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
};

/// Throws if |q| deviates from 1 by more than 1e-6.
Mat3 quat_to_matrix(const UnitQuaternion& q);

struct Pose {
  UnitQuaternion rotation;
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Mat3 rotation_matrix() const { return quat_to_matrix(rotation); }
  Vec3 apply(const Vec3& p) const { return rotation_matrix() * p + translation; }
};

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);
PointCloud apply(const Pose& p, const PointCloud& pts);

struct CameraIntrinsics {
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);
};

struct PixelCoord {
  int u = 0, v = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct DepthMap {
  int width = 0, height = 0;
  std::vector<double> data;  // meters, row-major

  DepthMap() = default;
  DepthMap(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0) {}
  double& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
  double at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }
};

struct DeprojectResult {
  PointCloud points;
  std::vector<PixelCoord> pixels;  // same order as points
  int skipped = 0;                 // masked pixels with invalid depth
};

/// Pixel (u, v) with depth z maps to ((u-cx)z/fx, (v-cy)z/fy, z).
/// (0,0) is the center of the top-left pixel.
DeprojectResult deproject(const DepthMap& depth, const CameraIntrinsics& k,
                          const std::vector<PixelCoord>& mask);

/// Throws if z <= 0.
Vec2 project(const Vec3& pt, const CameraIntrinsics& k);

struct TranslationBounds {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

/// Rotation uniform on SO(3); translation uniform in bounds. If intrinsics
/// are given, the sampled center must project inside the image (throws
/// otherwise -- the bounds are expected to guarantee it).
Pose random_pose(Rng& rng, const TranslationBounds& bounds,
                 const CameraIntrinsics* frustum = nullptr);

/// Rotation by angle (radians) about a unit axis.
UnitQuaternion axis_angle(const Vec3& axis, double angle);

/// R(q) for an arbitrary (not necessarily unit) quaternion via the
/// homogeneous form S(q)/|q|^2; equals quat_to_matrix(normalize(q)).
Mat3 rotation_matrix_homogeneous(double w, double x, double y, double z);

/// d/d(w,x,y,z) of rotation_matrix_homogeneous at raw q.
std::array<Mat3, 4> rotation_jacobian_homogeneous(double w, double x, double y, double z);

}  // namespace sixd
