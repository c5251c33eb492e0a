#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sctmd/image.hpp"

namespace sctmd {

enum class DType { f32, f64, i32 };

std::string to_string(DType t);
DType dtype_from_string(const std::string& s);

/// In-memory form of the "SCTR1" container. Values are held as doubles and
/// converted to `dtype` on write.
///
/// Layout (little-endian): "SCTR1", u32 width, u32 height, u32 channels,
/// u32 length + dtype tag, u32 length + kind, u32 length + JSON metadata,
/// then width*height*channels values, channel-major and row-major.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  DType dtype = DType::f64;
  std::string kind;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<double> data;

  ImageStack stack() const;
  static Raster from_stack(const ImageStack& s, DType dtype, std::string kind, nlohmann::json metadata);
};

std::vector<std::uint8_t> encode_raster(const Raster& r);
Raster decode_raster(const std::vector<std::uint8_t>& bytes, const std::string& source = "raster");

/// Writes through a temporary file and a rename.
void write_raster(const std::filesystem::path& path, const Raster& r);
Raster read_raster(const std::filesystem::path& path);

/// 8-bit grayscale PNG: values mapped linearly from [lo, hi] to [0, 255] and
/// clipped. The window and `text` are stored as tEXt chunks.
void write_png_gray(const std::filesystem::path& path, std::span<const double> image, int width, int height,
                    double lo, double hi, const std::vector<std::pair<std::string, std::string>>& text = {});

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sctmd
