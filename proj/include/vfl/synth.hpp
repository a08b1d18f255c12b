#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vfl/image.hpp"
#include "vfl/png_io.hpp"
#include "vfl/rng.hpp"

namespace vfl {

// Procedural RGB-D frame: patterned color over smooth depth relief (tilted
// plane plus a few soft bumps). Fully deterministic in (seed, index).
inline RgbdFrame make_synthetic_frame(int width, int height, std::uint64_t seed, int index) {
  if (width < 2 || height < 2) throw InputError("frame must be at least 2x2");
  SplitMix rng(derive_seed(seed, static_cast<std::uint64_t>(index), 0x5ce9e));
  RgbdFrame frame = RgbdFrame::create(width, height);

  std::array<Rgb8, 4> palette;
  for (auto& c : palette)
    c = {static_cast<std::uint8_t>(40 + rng.next_below(190)),
         static_cast<std::uint8_t>(40 + rng.next_below(190)),
         static_cast<std::uint8_t>(40 + rng.next_below(190))};

  const double base = rng.next_in(2.4, 2.8);
  const double tilt_x = rng.next_in(-0.12, 0.12);
  const double tilt_y = rng.next_in(-0.10, 0.10);

  struct Bump {
    double cx, cy, amp, sigma;
  };
  std::array<Bump, 3> bumps;
  for (auto& b : bumps)
    b = {rng.next_in(0.15, 0.85) * width, rng.next_in(0.15, 0.85) * height,
         rng.next_in(-0.14, 0.14), rng.next_in(0.12, 0.25) * width};

  const int checker = 24 + static_cast<int>(rng.next_below(33));
  const int stripe = 16 + static_cast<int>(rng.next_below(25));
  const std::uint64_t jitter_key = rng.next();

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double nx = static_cast<double>(x) / (width - 1) - 0.5;
      const double ny = static_cast<double>(y) / (height - 1) - 0.5;
      double d = base + 2 * tilt_x * nx + 2 * tilt_y * ny;
      for (const Bump& b : bumps) {
        const double dx = x - b.cx;
        const double dy = y - b.cy;
        d += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.sigma * b.sigma));
      }
      frame.depth_m.at(x, y) = std::clamp(d, 1.2, 9.5);
      frame.valid.at(x, y) = 1;

      std::size_t idx = ((x / checker + y / checker) & 1) ? 0 : 1;
      if (((x + 2 * y) / stripe) % 3 == 0) idx = 2;
      if ((x / checker + 2 * (y / checker)) % 7 == 0) idx = 3;
      const Rgb8 c = palette[idx];
      const std::uint64_t bits =
          derive_seed(jitter_key, static_cast<std::uint64_t>(y) * width + x);
      auto jit = [&](std::uint8_t v, int shift) {
        const int j = static_cast<int>((bits >> shift) % 21) - 10;
        return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + j, 0, 255));
      };
      frame.color.at(x, y) = {jit(c.r, 0), jit(c.g, 8), jit(c.b, 16)};
    }
  }
  return frame;
}

// Writes `count` color/depth pairs named scene_<idx>.png / scene_<idx>_depth.png.
inline std::vector<std::string> write_synthetic_corpus(const std::string& dir, int count,
                                                       std::uint64_t seed, int width,
                                                       int height, double depth_scale) {
  if (count < 1) throw InputError("corpus needs at least one frame");
  std::filesystem::create_directories(dir);
  std::vector<std::string> stems;
  for (int i = 0; i < count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%03d", i);
    const std::string stem = buf;
    const RgbdFrame frame = make_synthetic_frame(width, height, seed, i);
    save_rgbd(frame, dir + "/" + stem + ".png", dir + "/" + stem + "_depth.png", depth_scale);
    stems.push_back(stem);
  }
  return stems;
}

}  // namespace vfl
