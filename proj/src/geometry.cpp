#include "sixd/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sixd {

namespace {

// Canonical form: w >= 0; for w == 0, first nonzero of (x, y, z) >= 0.
UnitQuaternion canonicalize(UnitQuaternion q) {
  bool flip = q.w < 0.0;
  if (q.w == 0.0) {
    if (q.x != 0.0)
      flip = q.x < 0.0;
    else if (q.y != 0.0)
      flip = q.y < 0.0;
    else
      flip = q.z < 0.0;
  }
  if (flip) {
    q.w = -q.w;
    q.x = -q.x;
    q.y = -q.y;
    q.z = -q.z;
  }
  return q;
}

}  // namespace

UnitQuaternion UnitQuaternion::normalized(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 1e-12))
    throw std::invalid_argument("UnitQuaternion::normalized: near-zero norm");
  return canonicalize({w / n, x / n, y / n, z / n});
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& r) {
  // Shepperd's method: pick the largest diagonal combination.
  const double t = r.trace();
  double w, x, y, z;
  if (t > 0.0) {
    double s = std::sqrt(t + 1.0) * 2.0;
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  return normalized(w, x, y, z);
}

double UnitQuaternion::angle() const {
  const double c = std::min(1.0, std::abs(w));
  return 2.0 * std::acos(c);
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion::normalized(
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w);
}

Mat3 quat_to_matrix(const UnitQuaternion& q) {
  if (std::abs(q.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("quat_to_matrix: quaternion requires normalization");
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation_matrix() * b.translation + a.translation;
  return out;
}

Pose invert(const Pose& p) {
  Pose out;
  out.rotation = p.rotation.conjugate();
  out.translation = -(out.rotation_matrix() * p.translation);
  return out;
}

PointCloud apply(const Pose& p, const PointCloud& pts) {
  const Mat3 r = p.rotation_matrix();
  PointCloud out(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) out[i] = r * pts[i] + p.translation;
  return out;
}

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_,
                                   int width_, int height_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw std::invalid_argument("CameraIntrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("CameraIntrinsics: image size must be positive");
  if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
    throw std::invalid_argument("CameraIntrinsics: principal point outside image");
}

DeprojectResult deproject(const DepthMap& depth, const CameraIntrinsics& k,
                          const std::vector<PixelCoord>& mask) {
  DeprojectResult out;
  out.points.reserve(mask.size());
  out.pixels.reserve(mask.size());
  for (const PixelCoord& px : mask) {
    const double z = depth.at(px.u, px.v);
    if (!(z > 0.0) || !std::isfinite(z)) {
      ++out.skipped;
      continue;
    }
    out.points.emplace_back((px.u - k.cx) * z / k.fx, (px.v - k.cy) * z / k.fy, z);
    out.pixels.push_back(px);
  }
  return out;
}

Vec2 project(const Vec3& pt, const CameraIntrinsics& k) {
  if (!(pt.z() > 0.0))
    throw std::invalid_argument("project: point behind camera (z <= 0)");
  return {k.fx * pt.x() / pt.z() + k.cx, k.fy * pt.y() / pt.z() + k.cy};
}

Pose random_pose(Rng& rng, const TranslationBounds& bounds, const CameraIntrinsics* frustum) {
  // Uniform on SO(3): normalized 4-d gaussian.
  const double a = rng.gaussian(), b = rng.gaussian(), c = rng.gaussian(), d = rng.gaussian();
  Pose p;
  p.rotation = UnitQuaternion::normalized(a, b, c, d);
  for (int i = 0; i < 3; ++i)
    p.translation[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
  if (!(p.translation.z() > 0.0))
    throw std::invalid_argument("random_pose: bounds allow z <= 0 (behind camera)");
  if (frustum) {
    const Vec2 uv = project(p.translation, *frustum);
    if (uv.x() < 0.0 || uv.x() > frustum->width - 1 || uv.y() < 0.0 ||
        uv.y() > frustum->height - 1)
      throw std::invalid_argument("random_pose: bounds place object center outside frustum");
  }
  return p;
}

UnitQuaternion axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  const double s = std::sin(angle / 2.0);
  return UnitQuaternion::normalized(std::cos(angle / 2.0), a.x() * s, a.y() * s, a.z() * s);
}

Mat3 rotation_matrix_homogeneous(double w, double x, double y, double z) {
  const double n = w * w + x * x + y * y + z * z;
  Mat3 s;
  s << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return s / n;
}

std::array<Mat3, 4> rotation_jacobian_homogeneous(double w, double x, double y, double z) {
  const double n = w * w + x * x + y * y + z * z;
  Mat3 s;
  s << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;

  // dS/dq for the unnormalized quadratic form.
  Mat3 dw, dx, dy, dz;
  dw << 2 * w, -2 * z, 2 * y,
        2 * z, 2 * w, -2 * x,
        -2 * y, 2 * x, 2 * w;
  dx << 2 * x, 2 * y, 2 * z,
        2 * y, -2 * x, -2 * w,
        2 * z, 2 * w, -2 * x;
  dy << -2 * y, 2 * x, 2 * w,
        2 * x, 2 * y, 2 * z,
        -2 * w, 2 * z, -2 * y;
  dz << -2 * z, -2 * w, 2 * x,
        2 * w, -2 * z, 2 * y,
        2 * x, 2 * y, 2 * z;

  // d(S/n)/dq_a = dS/dq_a / n - S * 2 q_a / n^2
  const double q[4] = {w, x, y, z};
  std::array<Mat3, 4> out = {dw / n, dx / n, dy / n, dz / n};
  for (int a = 0; a < 4; ++a) out[a] -= s * (2.0 * q[a] / (n * n));
  return out;
}

}  // namespace sixd
