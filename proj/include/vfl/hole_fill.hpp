#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "vfl/errors.hpp"
#include "vfl/image.hpp"
#include "vfl/rng.hpp"

namespace vfl {

enum class NeighborhoodClass { A, B, C };

// valid[row][col] over a 3x3 window; the center must be a hole. Class A:
// all four edge-adjacent neighbors are valid. Class C: every neighbor is a
// hole. Class B: anything in between.
inline NeighborhoodClass classify(const std::array<std::array<bool, 3>, 3>& valid) {
  if (valid[1][1]) throw InputError("window center must be a hole");
  if (valid[0][1] && valid[1][0] && valid[1][2] && valid[2][1]) return NeighborhoodClass::A;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (valid[r][c]) return NeighborhoodClass::B;
  return NeighborhoodClass::C;
}

namespace detail {

struct PixelSum {
  double depth = 0;
  double r = 0, g = 0, b = 0;
  int n = 0;

  void add(const Image<Rgb8>& color, const Image<double>& depth_m, int x, int y) {
    const Rgb8 c = color.at(x, y);
    depth += depth_m.at(x, y);
    r += c.r;
    g += c.g;
    b += c.b;
    ++n;
  }

  double mean_depth() const { return depth / n; }

  Rgb8 mean_color() const {
    auto chan = [this](double s) {
      return static_cast<std::uint8_t>(std::llround(s / n));
    };
    return {chan(r), chan(g), chan(b)};
  }
};

}  // namespace detail

// Fills every hole by repeated 3x3 template passes in raster order.
// Classification and class A/B averages use validity frozen at the start of
// the pass; pixels outside the image count as holes. Class C copies the
// left or top neighbor using their in-pass state, picking between the two
// with a seeded fair coin when both are available. Remaining holes after a
// pass without progress (unreachable for connected masks) take the nearest
// valid pixel by Euclidean distance.
inline RgbdFrame fill(const SparseRgbdFrame& sparse, std::uint64_t seed) {
  const int w = sparse.width();
  const int h = sparse.height();
  if (w < 1 || h < 1) throw InputError("frame must be non-empty");
  if (sparse.depth_m.width() != w || sparse.depth_m.height() != h ||
      sparse.hole_mask.width() != w || sparse.hole_mask.height() != h)
    throw InputError("frame planes disagree in size");

  RgbdFrame out;
  out.color = sparse.color;
  out.depth_m = sparse.depth_m;
  out.valid = Image<std::uint8_t>(w, h, 0);

  std::size_t holes = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (sparse.hole_mask.at(x, y)) {
        ++holes;
      } else {
        if (!(sparse.depth_m.at(x, y) > 0))
          throw InputError("non-hole pixel carries non-positive depth");
        out.valid.at(x, y) = 1;
      }
    }
  }
  if (holes == sparse.hole_mask.size())
    throw UnfillableFrameError("frame has no valid pixel to fill from");

  Image<std::uint8_t> start(w, h, 0);
  while (holes > 0) {
    start = out.valid;
    auto valid_at_start = [&](int x, int y) {
      return start.in_bounds(x, y) && start.at(x, y) != 0;
    };

    std::size_t filled = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (start.at(x, y)) continue;

        const bool up = valid_at_start(x, y - 1);
        const bool left = valid_at_start(x - 1, y);
        const bool right = valid_at_start(x + 1, y);
        const bool down = valid_at_start(x, y + 1);

        detail::PixelSum sum;
        if (up && left && right && down) {
          sum.add(out.color, out.depth_m, x, y - 1);
          sum.add(out.color, out.depth_m, x - 1, y);
          sum.add(out.color, out.depth_m, x + 1, y);
          sum.add(out.color, out.depth_m, x, y + 1);
        } else {
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
              if ((dx || dy) && valid_at_start(x + dx, y + dy))
                sum.add(out.color, out.depth_m, x + dx, y + dy);
        }

        if (sum.n > 0) {
          out.depth_m.at(x, y) = sum.mean_depth();
          out.color.at(x, y) = sum.mean_color();
          out.valid.at(x, y) = 1;
          ++filled;
          continue;
        }

        // Isolated window: copy from the left or top neighbor filled
        // earlier in this same pass.
        const bool left_ok = x > 0 && out.valid.at(x - 1, y);
        const bool top_ok = y > 0 && out.valid.at(x, y - 1);
        if (!left_ok && !top_ok) continue;
        const std::uint64_t counter =
            static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(w) + x;
        const bool use_left = left_ok && (!top_ok || coin_flip(seed, counter));
        const int sx = use_left ? x - 1 : x;
        const int sy = use_left ? y : y - 1;
        out.depth_m.at(x, y) = out.depth_m.at(sx, sy);
        out.color.at(x, y) = out.color.at(sx, sy);
        out.valid.at(x, y) = 1;
        ++filled;
      }
    }

    holes -= filled;
    if (filled == 0) break;
  }

  if (holes > 0) {
    const Image<std::uint8_t> snapshot = out.valid;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (out.valid.at(x, y)) continue;
        long best = std::numeric_limits<long>::max();
        int bx = -1, by = -1;
        for (int sy = 0; sy < h; ++sy) {
          for (int sx = 0; sx < w; ++sx) {
            if (!snapshot.at(sx, sy)) continue;
            const long dx = sx - x;
            const long dy = sy - y;
            const long d2 = dx * dx + dy * dy;
            if (d2 < best) {
              best = d2;
              bx = sx;
              by = sy;
            }
          }
        }
        out.depth_m.at(x, y) = out.depth_m.at(bx, by);
        out.color.at(x, y) = out.color.at(bx, by);
        out.valid.at(x, y) = 1;
      }
    }
  }

  return out;
}

}  // namespace vfl
