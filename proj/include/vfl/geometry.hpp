#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "vfl/errors.hpp"
#include "vfl/image.hpp"

namespace vfl {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Pinhole intrinsics with square pixels and no skew; f in pixels.
struct Intrinsics {
  double f = 0;
  double u0 = 0;
  double v0 = 0;
  int width = 0;
  int height = 0;

  static Intrinsics validated(Intrinsics k) {
    if (!(k.f > 0) || !std::isfinite(k.f)) throw InputError("focal length must be positive and finite");
    if (k.width < 1 || k.height < 1) throw InputError("image dimensions must be positive");
    if (!std::isfinite(k.u0) || !std::isfinite(k.v0)) throw InputError("principal point must be finite");
    return k;
  }

  // Principal point at the image center.
  static Intrinsics centered(double f, int width, int height) {
    return validated({f, width / 2.0, height / 2.0, width, height});
  }

  Intrinsics with_focal(double f_new) const {
    return validated({f_new, u0, v0, width, height});
  }
};

// Rigid motion applied to camera-frame points as X' = R (X - t).
struct RigidMotion {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return R * (p - t); }

  // X' = R(X - t)  =>  X = R^T X' + t = R^T (X' - (-R t))
  RigidMotion inverse() const { return {R.transpose(), -(R * t)}; }

  bool is_rotation(double tol = 1e-12) const {
    const Mat3 gram = R.transpose() * R;
    return (gram - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
  }
};

struct ColoredPoint {
  Vec3 p = Vec3::Zero();  // camera frame, meters
  Rgb8 color;
  int src_u = 0;
  int src_v = 0;
};

using ColoredPointCloud = std::vector<ColoredPoint>;

struct PixelDepth {
  double u = 0;
  double v = 0;
  double z = 0;
};

inline Vec3 backproject_pixel(double u, double v, double depth_m, const Intrinsics& K) {
  return {(u - K.u0) * depth_m / K.f, (v - K.v0) * depth_m / K.f, depth_m};
}

// Lifts every valid pixel to a colored 3D point, row-major scan order.
inline ColoredPointCloud backproject(const RgbdFrame& frame, const Intrinsics& K) {
  if (frame.width() != K.width || frame.height() != K.height)
    throw InputError("frame dimensions do not match intrinsics");
  ColoredPointCloud cloud;
  cloud.reserve(frame.depth_m.size());
  for (int v = 0; v < frame.height(); ++v) {
    for (int u = 0; u < frame.width(); ++u) {
      const double z = frame.depth_m.at(u, v);
      if (!frame.valid.at(u, v) || !(z > 0) || !std::isfinite(z)) continue;
      cloud.push_back({backproject_pixel(u, v, z, K), frame.color.at(u, v), u, v});
    }
  }
  return cloud;
}

inline PixelDepth project(const Vec3& p, const Intrinsics& K) {
  if (!(p.z() > 0)) throw BehindCameraError("cannot project a point with non-positive depth");
  return {K.f * p.x() / p.z() + K.u0, K.f * p.y() / p.z() + K.v0, p.z()};
}

enum class Axis { x, y, z };

// Standard right-handed rotation: rotation_about_axis(Axis::y, pi/2) maps
// (0,0,1) to (1,0,0).
inline Mat3 rotation_about_axis(Axis axis, double angle_rad) {
  if (!std::isfinite(angle_rad)) throw InputError("rotation angle must be finite");
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  Mat3 r;
  switch (axis) {
    case Axis::x:
      r << 1, 0, 0, 0, c, -s, 0, s, c;
      break;
    case Axis::y:
      r << c, 0, s, 0, 1, 0, -s, 0, c;
      break;
    case Axis::z:
      r << c, -s, 0, s, c, 0, 0, 0, 1;
      break;
  }
  return r;
}

inline ColoredPointCloud apply_motion(ColoredPointCloud cloud, const RigidMotion& m) {
  for (auto& cp : cloud) cp.p = m.apply(cp.p);
  return cloud;
}

// View re-centering move: the camera rotates by angle_rad about its x or y
// axis while its focal length changes to f_new, and translates so the scene
// stays centered in the new view.
struct RecenteringSpec {
  Axis axis = Axis::y;
  double angle_rad = 0;
  double f_new = 0;

  void validate() const {
    if (axis == Axis::z) throw InputError("recentering axis must be x or y");
    if (!std::isfinite(angle_rad) || !(std::abs(angle_rad) < 1.5707963267948966))
      throw InputError("recentering angle must satisfy |angle| < pi/2");
    if (!(f_new > 0) || !std::isfinite(f_new)) throw InputError("new focal length must be positive");
  }
};

// Camera translation that keeps the cloud centered after the focal change
// and rotation. Each component is the average over all points of its
// closed-form per-point expression; the depth component reuses the averaged
// lateral component.
inline Vec3 recentering_translation(const ColoredPointCloud& cloud, const Intrinsics& K,
                                    const RecenteringSpec& spec) {
  spec.validate();
  Intrinsics::validated(K);
  if (cloud.empty()) throw InputError("recentering requires a non-empty point cloud");

  const double n = static_cast<double>(cloud.size());
  const double c = std::cos(spec.angle_rad);
  const double s = std::sin(spec.angle_rad);
  const double tn = s / c;
  const double gain = spec.f_new / (K.f * c);

  if (spec.axis == Axis::y) {
    double cx = 0;
    for (const auto& cp : cloud) cx += cp.p.x() - (cp.p.x() + cp.p.z() * s) / c;
    cx /= n;
    double cz = 0;
    for (const auto& cp : cloud) cz += cp.p.z() - gain * cp.p.z() + (cp.p.x() - cx) * tn;
    cz /= n;
    return {cx, 0.0, cz};
  }

  double cy = 0;
  for (const auto& cp : cloud) cy += cp.p.y() - (cp.p.y() - cp.p.z() * s) / c;
  cy /= n;
  double cz = 0;
  for (const auto& cp : cloud) cz += cp.p.z() - gain * cp.p.z() - (cp.p.y() - cy) * tn;
  cz /= n;
  return {0.0, cy, cz};
}

// angle_rad names the camera's own right-handed rotation, so point
// coordinates transform by the transpose. That pairing keeps re-projected
// depth at (f_new / f) * Z, which is what makes the focal change look like a
// pure zoom for centered content.
inline RigidMotion recentering_motion(const ColoredPointCloud& cloud, const Intrinsics& K,
                                      const RecenteringSpec& spec) {
  return {rotation_about_axis(spec.axis, spec.angle_rad).transpose(),
          recentering_translation(cloud, K, spec)};
}

}  // namespace vfl
