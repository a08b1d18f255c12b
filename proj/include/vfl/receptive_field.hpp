#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfl/errors.hpp"
#include "vfl/image.hpp"

namespace vfl {

// One window-reading layer. Convolution and pooling propagate usage counts
// identically; only the window geometry matters.
struct LayerSpec {
  enum class Kind { conv, pool };

  Kind kind = Kind::conv;
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  void validate() const {
    if (kernel < 1) throw InputError("kernel must be >= 1");
    if (stride < 1) throw InputError("stride must be >= 1");
    if (padding < 0) throw InputError("padding must be >= 0");
  }
};

struct PlaneSize {
  int width = 0;
  int height = 0;
};

struct Architecture {
  int input_width = 0;
  int input_height = 0;
  std::vector<LayerSpec> layers;

  // Plane size before each layer plus the final output; [0] is the input.
  std::vector<PlaneSize> plane_sizes() const {
    if (input_width < 1 || input_height < 1)
      throw InputError("input plane must be at least 1x1");
    if (layers.empty()) throw InputError("architecture needs at least one layer");
    std::vector<PlaneSize> sizes;
    sizes.push_back({input_width, input_height});
    for (const LayerSpec& layer : layers) {
      layer.validate();
      const PlaneSize in = sizes.back();
      const int w = (in.width + 2 * layer.padding - layer.kernel) / layer.stride + 1;
      const int h = (in.height + 2 * layer.padding - layer.kernel) / layer.stride + 1;
      if (in.width + 2 * layer.padding < layer.kernel ||
          in.height + 2 * layer.padding < layer.kernel || w < 1 || h < 1)
        throw InputError("layer collapses the plane below 1x1");
      sizes.push_back({w, h});
    }
    return sizes;
  }

  PlaneSize output_size() const { return plane_sizes().back(); }

  static Architecture from_json(const nlohmann::json& j) {
    Architecture arch;
    arch.input_width = j.at("input_width").get<int>();
    arch.input_height = j.at("input_height").get<int>();
    for (const auto& lj : j.at("layers")) {
      LayerSpec layer;
      const std::string kind = lj.value("kind", "conv");
      if (kind == "conv") {
        layer.kind = LayerSpec::Kind::conv;
      } else if (kind == "pool") {
        layer.kind = LayerSpec::Kind::pool;
      } else {
        throw InputError("layer kind must be conv or pool: " + kind);
      }
      layer.kernel = lj.at("kernel").get<int>();
      layer.stride = lj.value("stride", 1);
      layer.padding = lj.value("padding", 0);
      layer.validate();
      arch.layers.push_back(layer);
    }
    arch.plane_sizes();
    return arch;
  }

  static Architecture load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(IoError::Kind::unreadable, "cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
      return from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("bad architecture file " + path + ": " + e.what());
    }
  }
};

// How often each input pixel feeds one output node, cropped to the nonzero
// support; (anchor_x, anchor_y) is the input coordinate of counts(0, 0).
struct CountMap {
  Image<std::uint64_t> counts;
  int anchor_x = 0;
  int anchor_y = 0;

  std::uint64_t max_count() const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) m = std::max(m, counts[i]);
    return m;
  }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i];
    return s;
  }
};

// Walks the usage count of (out_x, out_y) backwards: each node of a plane
// spreads its count uniformly over the in-bounds cells of its window one
// plane below. Padded (out-of-bounds) taps contribute nowhere.
inline CountMap count_map(const Architecture& arch, int out_x, int out_y) {
  const std::vector<PlaneSize> sizes = arch.plane_sizes();
  const PlaneSize out = sizes.back();
  if (out_x < 0 || out_x >= out.width || out_y < 0 || out_y >= out.height)
    throw InputError("output node lies outside the final plane");

  Image<std::uint64_t> cur(out.width, out.height, 0);
  cur.at(out_x, out_y) = 1;

  for (std::size_t li = arch.layers.size(); li-- > 0;) {
    const LayerSpec& layer = arch.layers[li];
    const PlaneSize in = sizes[li];
    Image<std::uint64_t> next(in.width, in.height, 0);
    for (int y = 0; y < cur.height(); ++y) {
      for (int x = 0; x < cur.width(); ++x) {
        const std::uint64_t c = cur.at(x, y);
        if (c == 0) continue;
        const int x0 = x * layer.stride - layer.padding;
        const int y0 = y * layer.stride - layer.padding;
        for (int ky = 0; ky < layer.kernel; ++ky) {
          const int iy = y0 + ky;
          if (iy < 0 || iy >= in.height) continue;
          for (int kx = 0; kx < layer.kernel; ++kx) {
            const int ix = x0 + kx;
            if (ix < 0 || ix >= in.width) continue;
            next.at(ix, iy) += c;
          }
        }
      }
    }
    cur = std::move(next);
  }

  int min_x = cur.width(), min_y = cur.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < cur.height(); ++y)
    for (int x = 0; x < cur.width(); ++x)
      if (cur.at(x, y) != 0) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
  if (max_x < 0) throw InputError("output node touches no input pixel");

  CountMap map;
  map.anchor_x = min_x;
  map.anchor_y = min_y;
  map.counts = Image<std::uint64_t>(max_x - min_x + 1, max_y - min_y + 1, 0);
  for (int y = min_y; y <= max_y; ++y)
    for (int x = min_x; x <= max_x; ++x)
      map.counts.at(x - min_x, y - min_y) = cur.at(x, y);
  return map;
}

inline void write_csv(const CountMap& map, std::ostream& os) {
  for (int y = 0; y < map.counts.height(); ++y) {
    for (int x = 0; x < map.counts.width(); ++x) {
      if (x) os << ',';
      os << map.counts.at(x, y);
    }
    os << '\n';
  }
}

// Binary PGM normalized so the peak count maps to 255.
inline void write_pgm(const CountMap& map, std::ostream& os) {
  const std::uint64_t peak = map.max_count();
  os << "P5\n" << map.counts.width() << ' ' << map.counts.height() << "\n255\n";
  for (int y = 0; y < map.counts.height(); ++y) {
    for (int x = 0; x < map.counts.width(); ++x) {
      const double v = peak ? 255.0 * static_cast<double>(map.counts.at(x, y)) /
                                  static_cast<double>(peak)
                            : 0.0;
      os.put(static_cast<char>(static_cast<std::uint8_t>(std::llround(v))));
    }
  }
}

}  // namespace vfl
