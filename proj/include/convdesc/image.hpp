#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "convdesc/tensor.hpp"

namespace convdesc {

/// Decoded 8-bit RGB image, interleaved row-major.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  bool empty() const { return width == 0 || height == 0; }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
    return rgb[(y * width + x) * 3 + c];
  }
};

/// Decodes any raster format OpenCV's codecs understand. Alpha is dropped and
/// single-channel images are replicated to RGB.
Raster decodeImage(const std::filesystem::path& path);
Raster decodeImage(const std::vector<std::uint8_t>& encoded,
                   const std::filesystem::path& nameForErrors);

/// Encodes by extension (png, ppm, jpg, ...).
void writeImage(const std::filesystem::path& path, const Raster& raster);

/// Bilinear resize with pixel-center alignment: source coordinate
/// (dst + 0.5) * in/out - 0.5, clamped to the valid range.
Tensor resizeBilinear(const Tensor& input, std::size_t outHeight,
                      std::size_t outWidth);

Tensor rasterToTensor(const Raster& raster);

/// ITU-R BT.601 luma on the 0..255 scale, H x W x 1.
Tensor lumaTensor(const Raster& raster);

}  // namespace convdesc
