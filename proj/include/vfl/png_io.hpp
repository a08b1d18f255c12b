#pragma once

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "vfl/errors.hpp"
#include "vfl/image.hpp"

namespace vfl {

namespace detail {

// libpng reports errors with longjmp; keeping every resource and buffer
// behind a heap pointer sidesteps the setjmp rules on clobbered locals.
struct PngReadState {
  std::FILE* file = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;

  ~PngReadState() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (file) std::fclose(file);
  }
};

struct PngWriteState {
  std::FILE* file = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;

  ~PngWriteState() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (file) std::fclose(file);
  }
};

inline void open_read(PngReadState& s, const std::string& path) {
  s.file = std::fopen(path.c_str(), "rb");
  if (!s.file) throw IoError(IoError::Kind::unreadable, "cannot open " + path);
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (s.png) s.info = png_create_info_struct(s.png);
  if (!s.info) throw IoError(IoError::Kind::unreadable, "libpng initialization failed");
}

inline void open_write(PngWriteState& s, const std::string& path) {
  s.file = std::fopen(path.c_str(), "wb");
  if (!s.file) throw IoError(IoError::Kind::unwritable, "cannot open " + path + " for writing");
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (s.png) s.info = png_create_info_struct(s.png);
  if (!s.info) throw IoError(IoError::Kind::unwritable, "libpng initialization failed");
}

}  // namespace detail

// Reads an 8-bit color PNG; palette and grayscale inputs are expanded and
// alpha is dropped. 16-bit files are rejected so a depth map passed in the
// color slot fails loudly.
inline Image<Rgb8> read_rgb8_png(const std::string& path) {
  auto s = std::make_unique<detail::PngReadState>();
  detail::open_read(*s, path);
  if (setjmp(png_jmpbuf(s->png)))
    throw IoError(IoError::Kind::unreadable, "failed to decode " + path);
  png_init_io(s->png, s->file);
  png_read_info(s->png, s->info);

  const png_uint_32 w = png_get_image_width(s->png, s->info);
  const png_uint_32 h = png_get_image_height(s->png, s->info);
  const int bit_depth = png_get_bit_depth(s->png, s->info);
  const int color_type = png_get_color_type(s->png, s->info);
  if (bit_depth == 16)
    throw IoError(IoError::Kind::bad_bit_depth, path + ": expected 8-bit color, found 16-bit");

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(s->png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(s->png);
  if (png_get_valid(s->png, s->info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(s->png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(s->png);
  png_set_strip_alpha(s->png);
  png_set_interlace_handling(s->png);
  png_read_update_info(s->png, s->info);

  if (png_get_bit_depth(s->png, s->info) != 8 || png_get_channels(s->png, s->info) != 3)
    throw IoError(IoError::Kind::bad_bit_depth, path + ": unsupported pixel layout");

  const std::size_t rowbytes = png_get_rowbytes(s->png, s->info);
  s->data.resize(rowbytes * h);
  s->rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) s->rows[y] = s->data.data() + y * rowbytes;
  png_read_image(s->png, s->rows.data());

  Image<Rgb8> out(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 y = 0; y < h; ++y) {
    const png_byte* row = s->rows[y];
    for (png_uint_32 x = 0; x < w; ++x)
      out.at(static_cast<int>(x), static_cast<int>(y)) = {row[3 * x], row[3 * x + 1],
                                                          row[3 * x + 2]};
  }
  return out;
}

// Reads a 16-bit single-channel PNG (big-endian sample order per the
// format); anything else is a bit-depth error.
inline Image<std::uint16_t> read_gray16_png(const std::string& path) {
  auto s = std::make_unique<detail::PngReadState>();
  detail::open_read(*s, path);
  if (setjmp(png_jmpbuf(s->png)))
    throw IoError(IoError::Kind::unreadable, "failed to decode " + path);
  png_init_io(s->png, s->file);
  png_read_info(s->png, s->info);

  const png_uint_32 w = png_get_image_width(s->png, s->info);
  const png_uint_32 h = png_get_image_height(s->png, s->info);
  if (png_get_color_type(s->png, s->info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(s->png, s->info) != 16)
    throw IoError(IoError::Kind::bad_bit_depth, path + ": expected 16-bit grayscale");

  png_set_interlace_handling(s->png);
  png_read_update_info(s->png, s->info);

  const std::size_t rowbytes = png_get_rowbytes(s->png, s->info);
  s->data.resize(rowbytes * h);
  s->rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) s->rows[y] = s->data.data() + y * rowbytes;
  png_read_image(s->png, s->rows.data());

  Image<std::uint16_t> out(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 y = 0; y < h; ++y) {
    const png_byte* row = s->rows[y];
    for (png_uint_32 x = 0; x < w; ++x)
      out.at(static_cast<int>(x), static_cast<int>(y)) =
          static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1]);
  }
  return out;
}

inline void write_rgb8_png(const Image<Rgb8>& image, const std::string& path) {
  if (image.empty()) throw InputError("cannot write an empty image");
  auto s = std::make_unique<detail::PngWriteState>();
  detail::open_write(*s, path);
  if (setjmp(png_jmpbuf(s->png)))
    throw IoError(IoError::Kind::unwritable, "failed to write " + path);
  png_init_io(s->png, s->file);
  png_set_IHDR(s->png, s->info, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  const std::size_t rowbytes = static_cast<std::size_t>(image.width()) * 3;
  s->data.resize(rowbytes * image.height());
  s->rows.resize(image.height());
  for (int y = 0; y < image.height(); ++y) {
    png_byte* row = s->data.data() + static_cast<std::size_t>(y) * rowbytes;
    s->rows[y] = row;
    for (int x = 0; x < image.width(); ++x) {
      const Rgb8 c = image.at(x, y);
      row[3 * x] = c.r;
      row[3 * x + 1] = c.g;
      row[3 * x + 2] = c.b;
    }
  }
  png_write_info(s->png, s->info);
  png_write_image(s->png, s->rows.data());
  png_write_end(s->png, nullptr);
}

inline void write_gray16_png(const Image<std::uint16_t>& image, const std::string& path) {
  if (image.empty()) throw InputError("cannot write an empty image");
  auto s = std::make_unique<detail::PngWriteState>();
  detail::open_write(*s, path);
  if (setjmp(png_jmpbuf(s->png)))
    throw IoError(IoError::Kind::unwritable, "failed to write " + path);
  png_init_io(s->png, s->file);
  png_set_IHDR(s->png, s->info, image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  const std::size_t rowbytes = static_cast<std::size_t>(image.width()) * 2;
  s->data.resize(rowbytes * image.height());
  s->rows.resize(image.height());
  for (int y = 0; y < image.height(); ++y) {
    png_byte* row = s->data.data() + static_cast<std::size_t>(y) * rowbytes;
    s->rows[y] = row;
    for (int x = 0; x < image.width(); ++x) {
      const std::uint16_t v = image.at(x, y);
      row[2 * x] = static_cast<png_byte>(v >> 8);
      row[2 * x + 1] = static_cast<png_byte>(v & 0xff);
    }
  }
  png_write_info(s->png, s->info);
  png_write_image(s->png, s->rows.data());
  png_write_end(s->png, nullptr);
}

// Depth PNG convention: 16-bit grayscale, stored value round(depth_m *
// depth_scale), 0 = no reading.
inline DepthMap depth_from_png(const Image<std::uint16_t>& raw, double depth_scale) {
  if (!(depth_scale > 0)) throw InputError("depth scale must be positive");
  DepthMap depth(raw.width(), raw.height(), 0.0);
  for (std::size_t i = 0; i < raw.size(); ++i)
    depth[i] = raw[i] ? static_cast<double>(raw[i]) / depth_scale : 0.0;
  return depth;
}

inline DepthMap load_depth_png(const std::string& path, double depth_scale) {
  return depth_from_png(read_gray16_png(path), depth_scale);
}

inline RgbdFrame load_rgbd(const std::string& color_path, const std::string& depth_path,
                           double depth_scale) {
  if (!(depth_scale > 0)) throw InputError("depth scale must be positive");
  Image<Rgb8> color = read_rgb8_png(color_path);
  Image<std::uint16_t> raw = read_gray16_png(depth_path);
  if (color.width() != raw.width() || color.height() != raw.height())
    throw IoError(IoError::Kind::dimension_mismatch,
                  color_path + " and " + depth_path + " differ in size");

  RgbdFrame frame = RgbdFrame::create(color.width(), color.height());
  frame.color = std::move(color);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const std::uint16_t v = raw.at(x, y);
      frame.depth_m.at(x, y) = v ? static_cast<double>(v) / depth_scale : 0.0;
      frame.valid.at(x, y) = v != 0;
    }
  }
  return frame;
}

// Writes the color/depth pair; valid depths quantizing outside [1, 65535]
// are clamped into it (0 is reserved for invalid) and counted in the return
// value.
inline int save_rgbd(const RgbdFrame& frame, const std::string& color_path,
                     const std::string& depth_path, double depth_scale) {
  if (!(depth_scale > 0)) throw InputError("depth scale must be positive");
  if (frame.depth_m.width() != frame.width() || frame.valid.width() != frame.width() ||
      frame.depth_m.height() != frame.height() || frame.valid.height() != frame.height())
    throw InputError("frame planes disagree in size");

  Image<std::uint16_t> raw(frame.width(), frame.height(), 0);
  int clamped = 0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (!frame.valid.at(x, y)) continue;
      long long q = std::llround(frame.depth_m.at(x, y) * depth_scale);
      if (q < 1) {
        q = 1;
        ++clamped;
      } else if (q > 65535) {
        q = 65535;
        ++clamped;
      }
      raw.at(x, y) = static_cast<std::uint16_t>(q);
    }
  }
  write_rgb8_png(frame.color, color_path);
  write_gray16_png(raw, depth_path);
  return clamped;
}

}  // namespace vfl
