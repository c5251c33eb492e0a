#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

#include "sctmd/errors.hpp"
#include "sctmd/raster_io.hpp"

namespace sctmd {

void write_png_gray(const std::filesystem::path& path, std::span<const double> image, int width, int height,
                    double lo, double hi, const std::vector<std::pair<std::string, std::string>>& text) {
  if (image.size() != std::size_t(width) * height) throw InputError("write_png_gray: size mismatch");
  if (!(hi > lo)) throw InputError("write_png_gray: empty window");
  std::vector<png_byte> pixels(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    double v = (image[i] - lo) / (hi - lo);
    v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    pixels[i] = static_cast<png_byte>(std::lround(v * 255.0));
  }

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw InputError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw NumericalError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  char window[64];
  std::snprintf(window, sizeof window, "%.9g,%.9g", lo, hi);
  std::vector<std::pair<std::string, std::string>> entries = {{"window", window}};
  entries.insert(entries.end(), text.begin(), text.end());
  std::vector<png_text> chunks(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    chunks[i] = png_text{};
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = entries[i].first.data();
    chunks[i].text = entries[i].second.data();
  }
  png_set_text(png, info, chunks.data(), int(chunks.size()));
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) png_write_row(png, pixels.data() + std::size_t(y) * width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace sctmd
