#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vfl/errors.hpp"

namespace vfl {

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

// Row-major 2D grid addressed as (x, y) = (column, row).
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T())
      : width_(width),
        height_(height),
        pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 1 || height < 1) throw InputError("image dimensions must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  T& at(int x, int y) { return pixels_[index(x, y)]; }
  const T& at(int x, int y) const { return pixels_[index(x, y)]; }

  T& operator[](std::size_t i) { return pixels_[i]; }
  const T& operator[](std::size_t i) const { return pixels_[i]; }

  std::vector<T>& pixels() { return pixels_; }
  const std::vector<T>& pixels() const { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> pixels_;
};

using DepthMap = Image<double>;

// Dense RGB-D frame. valid == 0 marks pixels with no depth reading; their
// stored depth is 0.
struct RgbdFrame {
  Image<Rgb8> color;
  Image<double> depth_m;
  Image<std::uint8_t> valid;

  static RgbdFrame create(int width, int height) {
    return {Image<Rgb8>(width, height), Image<double>(width, height, 0.0),
            Image<std::uint8_t>(width, height, 0)};
  }

  int width() const { return color.width(); }
  int height() const { return color.height(); }
};

// Forward-splat result. hole_mask == 1 exactly where no point landed; such
// pixels carry depth 0 and black color.
struct SparseRgbdFrame {
  Image<Rgb8> color;
  Image<double> depth_m;
  Image<std::uint8_t> hole_mask;

  static SparseRgbdFrame create(int width, int height) {
    return {Image<Rgb8>(width, height), Image<double>(width, height, 0.0),
            Image<std::uint8_t>(width, height, 1)};
  }

  int width() const { return color.width(); }
  int height() const { return color.height(); }

  std::size_t hole_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < hole_mask.size(); ++i) n += hole_mask[i] != 0;
    return n;
  }

  double hole_fraction() const {
    return hole_mask.empty() ? 0.0
                             : static_cast<double>(hole_count()) /
                                   static_cast<double>(hole_mask.size());
  }
};

}  // namespace vfl
