#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "convdesc/tensor.hpp"
#include "convdesc/vgg.hpp"

namespace convdesc {

inline constexpr std::size_t kSiftCells = 4;
inline constexpr std::size_t kSiftOrientations = 8;
inline constexpr std::size_t kSiftDim = kSiftCells * kSiftCells * kSiftOrientations;

struct DenseGridParams {
  std::size_t patchSize = 16;
  std::size_t step = 8;

  /// patchSize >= 4 and divisible by 4, step >= 1.
  void validate() const;
};

struct SiftDescriptor {
  std::array<float, kSiftDim> values{};
  std::size_t y = 0;  // patch center row
  std::size_t x = 0;  // patch center column
  std::size_t channelIndex = 0;
};

struct GradientField {
  Tensor magnitude;
  Tensor orientation;  // radians in [0, 2*pi)
};

/// Central differences in the interior, one-sided at the borders. x grows to
/// the right and y grows downwards, so a ramp increasing with x has
/// orientation 0.
GradientField gradientField(const Tensor& map);

/// Unnormalized histogram for the patch with top-left corner (top, left):
/// magnitude-weighted, soft-assigned bilinearly across the 4x4 cells and
/// linearly across the 8 orientation bins. Layout is cell-major
/// (cellY, cellX, bin).
std::array<double, kSiftDim> siftPatchHistogram(const GradientField& field,
                                                std::size_t top, std::size_t left,
                                                std::size_t patchSize);

/// L2-normalize, clamp at 0.2, renormalize. All-zero input stays zero.
std::array<float, kSiftDim> normalizeSift(const std::array<double, kSiftDim>& hist);

std::size_t denseGridCount(std::size_t extent, std::size_t patchSize, std::size_t step);

/// Dense upright SIFT over every channel. Output is channel-major, then
/// row-major patch order.
std::vector<SiftDescriptor> denseSift(const ConvMapSet& maps, const DenseGridParams& grid);

/// Descriptors as a flat row-major count x 128 matrix.
std::vector<float> descriptorMatrix(const std::vector<SiftDescriptor>& descriptors);

/// CDSD dump: "CDSD", count u32, dim u32 (=128), f32 rows, CRC32.
std::vector<std::uint8_t> encodeDescriptorDump(const std::vector<float>& matrix,
                                               std::size_t dim = kSiftDim);
std::vector<float> decodeDescriptorDump(const std::vector<std::uint8_t>& bytes,
                                        const std::string& context);

}  // namespace convdesc
