#pragma once

#include <cmath>

#include <json.hpp>

#include "vfl/errors.hpp"
#include "vfl/geometry.hpp"
#include "vfl/image.hpp"

namespace vfl {

// Depth at which a frontoparallel plane photographed with focal f2 produces
// the image it gave with focal f1 at depth d1. Computed ratio-first so the
// per-pixel identity z2 == (f2 / f1) * z1 holds bitwise.
inline double conjugate_depth(double d1_m, double f1, double f2) {
  if (!(d1_m > 0) || !std::isfinite(d1_m)) throw InputError("depth must be positive");
  if (!(f1 > 0) || !(f2 > 0) || !std::isfinite(f1) || !std::isfinite(f2))
    throw InputError("focal lengths must be positive");
  return (f2 / f1) * d1_m;
}

// Textured frontoparallel plane at distance depth_m. Texels are square with
// pitch texel_size_m; (center_x_m, center_y_m) shifts the texture center off
// the optical axis.
struct PlaneScene {
  Image<Rgb8> texture;
  double texel_size_m = 0.01;
  double depth_m = 1.0;
  double center_x_m = 0;
  double center_y_m = 0;

  void validate() const {
    if (texture.empty()) throw InputError("plane texture must be non-empty");
    if (!(texel_size_m > 0) || !std::isfinite(texel_size_m))
      throw InputError("texel size must be positive");
    if (!(depth_m > 0) || !std::isfinite(depth_m)) throw InputError("plane depth must be positive");
    if (!std::isfinite(center_x_m) || !std::isfinite(center_y_m))
      throw InputError("plane center must be finite");
  }
};

namespace detail {

// lateral_scale = depth / f: meters of plane crossed per pixel of offset
// from the principal point. Passed in rather than recomputed so that two
// views related by d2/f2 == d1/f1 sample texels identically.
inline RgbdFrame render_plane_scaled(const PlaneScene& scene, const Intrinsics& K,
                                     double lateral_scale, double depth_m) {
  RgbdFrame frame = RgbdFrame::create(K.width, K.height);
  const double ex = scene.texture.width() * scene.texel_size_m / 2;
  const double ey = scene.texture.height() * scene.texel_size_m / 2;
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const double x = (u - K.u0) * lateral_scale;
      const double y = (v - K.v0) * lateral_scale;
      const double tx = std::floor((x - scene.center_x_m + ex) / scene.texel_size_m);
      const double ty = std::floor((y - scene.center_y_m + ey) / scene.texel_size_m);
      if (tx < 0 || tx >= scene.texture.width() || ty < 0 || ty >= scene.texture.height())
        throw InputError("plane does not cover the full view");
      frame.color.at(u, v) = scene.texture.at(static_cast<int>(tx), static_cast<int>(ty));
      frame.depth_m.at(u, v) = depth_m;
      frame.valid.at(u, v) = 1;
    }
  }
  return frame;
}

}  // namespace detail

inline RgbdFrame render_plane(const PlaneScene& scene, const Intrinsics& K) {
  scene.validate();
  Intrinsics::validated(K);
  return detail::render_plane_scaled(scene, K, scene.depth_m / K.f, scene.depth_m);
}

// Two renders of one physical plane that produce the same image: (f1, d1)
// and (f2, conjugate depth). frame1.color == frame2.color bit for bit.
struct AmbiguityPair {
  double f1 = 0;
  double f2 = 0;
  double depth1_m = 0;
  double depth2_m = 0;
  RgbdFrame frame1;
  RgbdFrame frame2;

  nlohmann::json record() const {
    return nlohmann::json{
        {"f1", f1}, {"f2", f2}, {"depth1_m", depth1_m}, {"depth2_m", depth2_m}};
  }
};

inline AmbiguityPair generate_pair(const PlaneScene& scene, double f1, double f2,
                                   const Intrinsics& k_template) {
  scene.validate();
  Intrinsics::validated(k_template);
  const double d2 = conjugate_depth(scene.depth_m, f1, f2);

  AmbiguityPair pair;
  pair.f1 = f1;
  pair.f2 = f2;
  pair.depth1_m = scene.depth_m;
  pair.depth2_m = d2;

  // Shared sampling scale: equal to d2 / f2 exactly in real arithmetic, and
  // reusing the value makes the image identity exact in floating point too.
  const double q = scene.depth_m / f1;
  pair.frame1 = detail::render_plane_scaled(scene, k_template.with_focal(f1), q, scene.depth_m);
  pair.frame2 = detail::render_plane_scaled(scene, k_template.with_focal(f2), q, d2);
  return pair;
}

}  // namespace vfl
