#include "udc/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "udc/errors.hpp"

namespace udc {

void write_png(const std::string& path, const Image& im) {
  if (im.ch != 1 && im.ch != 3)
    throw std::invalid_argument("png: only 1- or 3-channel images");

  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("png: cannot create " + path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw IoError("png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("png: write failed for " + path);
  }

  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(im.w),
               static_cast<png_uint_32>(im.h), 8,
               im.ch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<size_t>(im.w) * im.ch);
  for (int y = 0; y < im.h; ++y) {
    for (int i = 0; i < im.w * im.ch; ++i) {
      double v = im.data[static_cast<size_t>(y) * im.w * im.ch + i];
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      row[static_cast<size_t>(i)] =
          static_cast<png_byte>(std::floor(v * 255.0 + 0.5));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace udc
