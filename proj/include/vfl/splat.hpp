#pragma once

#include <cmath>

#include "vfl/geometry.hpp"
#include "vfl/image.hpp"

namespace vfl {

// Symmetric round-half-up used for pixel quantization: floor(x + 0.5).
inline double quantize_coord(double x) { return std::floor(x + 0.5); }

// Forward-projects the cloud through K and keeps the nearest point per
// pixel. Exact depth ties go to the earlier point in cloud order; points
// behind the camera or landing outside the image are dropped.
inline SparseRgbdFrame splat(const ColoredPointCloud& cloud, const Intrinsics& K) {
  Intrinsics::validated(K);
  SparseRgbdFrame out = SparseRgbdFrame::create(K.width, K.height);
  for (const auto& cp : cloud) {
    const double z = cp.p.z();
    if (!(z > 0) || !std::isfinite(z)) continue;
    const double u = K.f * cp.p.x() / z + K.u0;
    const double v = K.f * cp.p.y() / z + K.v0;
    if (!std::isfinite(u) || !std::isfinite(v)) continue;
    const double qu = quantize_coord(u);
    const double qv = quantize_coord(v);
    if (qu < 0 || qu >= K.width || qv < 0 || qv >= K.height) continue;
    const int x = static_cast<int>(qu);
    const int y = static_cast<int>(qv);
    if (out.hole_mask.at(x, y) || z < out.depth_m.at(x, y)) {
      out.color.at(x, y) = cp.color;
      out.depth_m.at(x, y) = z;
      out.hole_mask.at(x, y) = 0;
    }
  }
  return out;
}

}  // namespace vfl
