#include "rainsep/raster.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <vector>

namespace rainsep {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

unsigned char quantize(double v) {
  // round half-up after clamping to [0,1]
  double scaled = std::floor(v * 255.0 + 0.5);
  if (scaled < 0.0) scaled = 0.0;
  if (scaled > 255.0) scaled = 255.0;
  return static_cast<unsigned char>(scaled);
}

// Decodes any libpng-readable variant into packed 8-bit RGB rows.
std::vector<unsigned char> read_rgb8(const std::string& path, Index& rows, Index& cols) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open '" + path + "' for reading");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  std::vector<unsigned char> data;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG '" + path + "'");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  png_byte color_type = png_get_color_type(png, info);
  png_byte bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  rows = static_cast<Index>(height);
  cols = static_cast<Index>(width);
  data.resize(static_cast<size_t>(height) * width * 3);
  row_ptrs.resize(height);
  for (png_uint_32 r = 0; r < height; ++r)
    row_ptrs[r] = data.data() + static_cast<size_t>(r) * width * 3;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return data;
}

// Writes packed 8-bit rows; gray_channels = 1 for masks, 3 for images.
// Goes through a temp file so failed writes never leave partial output.
void write_png8(const std::string& path, const unsigned char* data, Index rows, Index cols,
                int channels) {
  const std::string tmp = path + ".tmp";
  {
    FilePtr file(std::fopen(tmp.c_str(), "wb"));
    if (!file) throw IoError("cannot open '" + tmp + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      std::remove(tmp.c_str());
      throw IoError("failed to encode PNG '" + path + "'");
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> row_ptrs(rows);
    for (Index r = 0; r < rows; ++r)
      row_ptrs[r] = const_cast<png_bytep>(data + static_cast<size_t>(r) * cols * channels);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move temporary file onto '" + path + "'");
  }
}

}  // namespace

Raster load_png(const std::string& path) {
  Index rows = 0, cols = 0;
  const auto data = read_rgb8(path, rows, cols);
  Raster img(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const unsigned char* row = data.data() + static_cast<size_t>(i) * cols * 3;
    for (Index j = 0; j < cols; ++j)
      for (int c = 0; c < 3; ++c) img.channel[c](i, j) = row[j * 3 + c] / 255.0;
  }
  return img;
}

void save_png(const std::string& path, const Raster& image) {
  const Index rows = image.rows(), cols = image.cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("save_png: empty image");
  std::vector<unsigned char> data(static_cast<size_t>(rows) * cols * 3);
  for (Index i = 0; i < rows; ++i) {
    unsigned char* row = data.data() + static_cast<size_t>(i) * cols * 3;
    for (Index j = 0; j < cols; ++j)
      for (int c = 0; c < 3; ++c) row[j * 3 + c] = quantize(image.channel[c](i, j));
  }
  write_png8(path, data.data(), rows, cols, 3);
}

Mask load_mask_png(const std::string& path) {
  Index rows = 0, cols = 0;
  const auto data = read_rgb8(path, rows, cols);
  Mask mask(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      mask(i, j) = data[(static_cast<size_t>(i) * cols + j) * 3] > 127;
  return mask;
}

void save_mask_png(const std::string& path, const Mask& mask) {
  const Index rows = mask.rows(), cols = mask.cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("save_mask_png: empty mask");
  std::vector<unsigned char> data(static_cast<size_t>(rows) * cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      data[static_cast<size_t>(i) * cols + j] = mask(i, j) ? 255 : 0;
  write_png8(path, data.data(), rows, cols, 1);
}

}  // namespace rainsep
