#include "augkit/png_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "augkit/error.hpp"

namespace augkit {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image load_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("load_png: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("load_png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("load_png: out of memory");
  }
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_png: failed to decode " + path);
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  // Fold every variant down to 8-bit gray or RGB.
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const std::size_t width = png_get_image_width(png, info);
  const std::size_t height = png_get_image_height(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const std::size_t channels =
      color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_png: unsupported color type in " + path);
  }

  const std::size_t stride = width * channels;
  pixels.resize(height * stride);
  rows.resize(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(width, height, channels);
  for (std::size_t i = 0; i < pixels.size(); ++i)
    img.data()[i] = static_cast<double>(pixels[i]) / 255.0;
  return img;
}

void save_png(const std::string& path, const Image& img) {
  if (img.width() == 0 || img.height() == 0)
    throw InvalidParameterError("save_png: empty image");

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("save_png: cannot open " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("save_png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("save_png: out of memory");
  }
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("save_png: failed to encode " + path);
  }

  png_init_io(png, file.get());
  const int color_type =
      img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t stride = img.width() * img.channels();
  pixels.resize(img.height() * stride);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double v = img.data()[i];
    pixels[i] = static_cast<png_byte>(std::floor(v * 255.0 + 0.5));
  }
  rows.resize(img.height());
  for (std::size_t y = 0; y < img.height(); ++y)
    rows[y] = pixels.data() + y * stride;
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace augkit
