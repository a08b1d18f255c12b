#pragma once

// Shared helpers and independent reference implementations used to check
// the library against straightforward brute-force code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include <vfl/geometry.hpp>
#include <vfl/image.hpp>
#include <vfl/receptive_field.hpp>
#include <vfl/splat.hpp>

namespace support {

using Engine = std::mt19937_64;

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    const std::string name = "vfl-test-" + std::to_string(::getpid()) + "-" +
                             std::to_string(counter.fetch_add(1)) + "-" + std::to_string(rd());
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const {
    return leaf.empty() ? path_.string() : (path_ / leaf).string();
  }

 private:
  std::filesystem::path path_;
};

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
}

inline int uniform_int(Engine& eng, int lo, int hi) {
  return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline vfl::Rgb8 random_color(Engine& eng) {
  return {static_cast<std::uint8_t>(eng() % 256), static_cast<std::uint8_t>(eng() % 256),
          static_cast<std::uint8_t>(eng() % 256)};
}

inline vfl::RgbdFrame random_frame(Engine& eng, int w, int h, double depth_lo, double depth_hi,
                                   double hole_prob = 0) {
  vfl::RgbdFrame f = vfl::RgbdFrame::create(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (hole_prob > 0 && uniform(eng, 0, 1) < hole_prob) continue;
      f.color.at(x, y) = random_color(eng);
      f.depth_m.at(x, y) = uniform(eng, depth_lo, depth_hi);
      f.valid.at(x, y) = 1;
    }
  }
  return f;
}

inline vfl::RgbdFrame constant_depth_frame(Engine& eng, int w, int h, double depth) {
  vfl::RgbdFrame f = vfl::RgbdFrame::create(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f.color.at(x, y) = random_color(eng);
      f.depth_m.at(x, y) = depth;
      f.valid.at(x, y) = 1;
    }
  }
  return f;
}

inline vfl::SparseRgbdFrame random_sparse_frame(Engine& eng, int w, int h, double hole_prob) {
  vfl::SparseRgbdFrame f = vfl::SparseRgbdFrame::create(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (uniform(eng, 0, 1) < hole_prob) continue;
      f.color.at(x, y) = random_color(eng);
      f.depth_m.at(x, y) = uniform(eng, 0.5, 8.0);
      f.hole_mask.at(x, y) = 0;
    }
  }
  return f;
}

// Reference z-buffer: bucket all projected points per pixel, then pick the
// minimum depth, first-in-cloud-order on exact ties.
inline vfl::SparseRgbdFrame splat_oracle(const vfl::ColoredPointCloud& cloud,
                                         const vfl::Intrinsics& K) {
  struct Candidate {
    double z;
    std::size_t order;
    vfl::Rgb8 color;
  };
  std::map<std::pair<int, int>, std::vector<Candidate>> buckets;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& cp = cloud[i];
    if (!(cp.p.z() > 0) || !std::isfinite(cp.p.z())) continue;
    const double u = K.f * cp.p.x() / cp.p.z() + K.u0;
    const double v = K.f * cp.p.y() / cp.p.z() + K.v0;
    if (!std::isfinite(u) || !std::isfinite(v)) continue;
    const double qu = std::floor(u + 0.5);
    const double qv = std::floor(v + 0.5);
    if (qu < 0 || qu >= K.width || qv < 0 || qv >= K.height) continue;
    buckets[{static_cast<int>(qu), static_cast<int>(qv)}].push_back({cp.p.z(), i, cp.color});
  }
  vfl::SparseRgbdFrame out = vfl::SparseRgbdFrame::create(K.width, K.height);
  for (const auto& [px, cands] : buckets) {
    const Candidate* best = &cands.front();
    for (const Candidate& c : cands)
      if (c.z < best->z || (c.z == best->z && c.order < best->order)) best = &c;
    out.color.at(px.first, px.second) = best->color;
    out.depth_m.at(px.first, px.second) = best->z;
    out.hole_mask.at(px.first, px.second) = 0;
  }
  return out;
}

struct NaiveMetrics {
  double rel = 0, rms = 0, log10 = 0, d1 = 0, d2 = 0, d3 = 0;
  std::int64_t n = 0;
};

// One metric per pass, written as directly as possible.
inline NaiveMetrics naive_metrics(const vfl::DepthMap& pred, const vfl::DepthMap& gt,
                                  double cap = 0) {
  auto usable = [&](std::size_t i) {
    return gt[i] > 0 && std::isfinite(gt[i]) && (cap <= 0 || gt[i] <= cap);
  };
  NaiveMetrics m;
  for (std::size_t i = 0; i < gt.size(); ++i) m.n += usable(i);
  if (m.n == 0) return m;

  for (std::size_t i = 0; i < gt.size(); ++i)
    if (usable(i)) m.rel += std::abs(pred[i] - gt[i]) / gt[i];
  m.rel /= static_cast<double>(m.n);

  for (std::size_t i = 0; i < gt.size(); ++i)
    if (usable(i)) m.rms += (pred[i] - gt[i]) * (pred[i] - gt[i]);
  m.rms = std::sqrt(m.rms / static_cast<double>(m.n));

  std::int64_t n_log = 0;
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (usable(i) && pred[i] > 0 && std::isfinite(pred[i])) {
      m.log10 += std::abs(std::log10(pred[i]) - std::log10(gt[i]));
      ++n_log;
    }
  if (n_log > 0) m.log10 /= static_cast<double>(n_log);

  auto delta = [&](double threshold) {
    std::int64_t hits = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (!usable(i)) continue;
      if (!(pred[i] > 0) || !std::isfinite(pred[i])) continue;
      if (std::max(pred[i] / gt[i], gt[i] / pred[i]) < threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(m.n);
  };
  m.d1 = delta(1.25);
  m.d2 = delta(1.25 * 1.25);
  m.d3 = delta(1.25 * 1.25 * 1.25);
  return m;
}

inline double naive_mse(const vfl::DepthMap& pred, const vfl::DepthMap& gt) {
  double s = 0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!(gt[i] > 0) || !std::isfinite(gt[i])) continue;
    s += (pred[i] - gt[i]) * (pred[i] - gt[i]);
    ++n;
  }
  return s / static_cast<double>(n);
}

inline double naive_berhu(const vfl::DepthMap& pred, const vfl::DepthMap& gt) {
  std::vector<double> residuals;
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (gt[i] > 0 && std::isfinite(gt[i])) residuals.push_back(pred[i] - gt[i]);
  double max_abs = 0;
  for (double r : residuals) max_abs = std::max(max_abs, std::abs(r));
  if (max_abs == 0) return 0;
  const double c = 0.05 * max_abs;
  double s = 0;
  for (double r : residuals)
    s += std::abs(r) <= c ? std::abs(r) : (r * r + c * c) / (2 * c);
  return s / static_cast<double>(residuals.size());
}

// Receptive-field reference: recursively enumerate every window path from
// the output node down to input pixels, tallying leaf visits.
inline void rf_paths_recurse(const vfl::Architecture& arch,
                             const std::vector<vfl::PlaneSize>& sizes, std::size_t plane,
                             int x, int y, std::map<std::pair<int, int>, std::uint64_t>& tally) {
  if (plane == 0) {
    ++tally[{x, y}];
    return;
  }
  const vfl::LayerSpec& layer = arch.layers[plane - 1];
  const vfl::PlaneSize in = sizes[plane - 1];
  for (int ky = 0; ky < layer.kernel; ++ky) {
    for (int kx = 0; kx < layer.kernel; ++kx) {
      const int ix = x * layer.stride - layer.padding + kx;
      const int iy = y * layer.stride - layer.padding + ky;
      if (ix < 0 || ix >= in.width || iy < 0 || iy >= in.height) continue;
      rf_paths_recurse(arch, sizes, plane - 1, ix, iy, tally);
    }
  }
}

inline std::map<std::pair<int, int>, std::uint64_t> rf_paths_oracle(
    const vfl::Architecture& arch, int out_x, int out_y) {
  const std::vector<vfl::PlaneSize> sizes = arch.plane_sizes();
  std::map<std::pair<int, int>, std::uint64_t> tally;
  rf_paths_recurse(arch, sizes, arch.layers.size(), out_x, out_y, tally);
  return tally;
}

}  // namespace support
