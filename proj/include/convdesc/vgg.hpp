#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "convdesc/image.hpp"
#include "convdesc/tensor.hpp"

namespace convdesc {

/// One convolution layer of the fixed front section.
struct ConvLayerShape {
  const char* name;
  std::size_t kernelCount;
  std::size_t inChannels;
};

/// VGG-16 front through the second max-pool:
/// conv1_1, conv1_2, pool, conv2_1, conv2_2, pool. 3x3 kernels, stride 1,
/// same padding, ReLU after every convolution.
struct BackboneSpec {
  static constexpr std::size_t kInputSide = 224;
  static constexpr std::size_t kOutputSide = 56;
  static constexpr std::size_t kOutputChannels = 128;
  static constexpr std::size_t kKernelSide = 3;
  static constexpr std::array<ConvLayerShape, 4> kLayers{{
      {"conv1_1", 64, 3},
      {"conv1_2", 64, 64},
      {"conv2_1", 128, 64},
      {"conv2_2", 128, 128},
  }};
  /// Indices of convolution layers followed by a 2x2 max-pool.
  static constexpr std::array<std::size_t, 2> kPoolAfter{1, 3};
};

struct WeightStore {
  std::array<FilterBank, 4> banks;
  std::string sourceName;  // file the store was loaded from, if any
  std::uint32_t checksum = 0;  // CRC32 recorded in the file

  /// Throws FormatError naming the first layer that disagrees with BackboneSpec.
  void validateShapes() const;
};

inline constexpr std::uint32_t kWeightFormatVersion = 1;

/// CDWT layout, little-endian: "CDWT", version u32, layer count u32; per
/// layer: name (u32 length + UTF-8), kernelCount, kH, kW, inChannels (u32
/// each), weights f32[k][ky][kx][cin], biases f32[k]; trailing CRC32.
std::vector<std::uint8_t> encodeWeights(const WeightStore& store);
WeightStore decodeWeights(const std::vector<std::uint8_t>& bytes,
                          const std::string& sourceName);
void saveWeights(const std::filesystem::path& path, const WeightStore& store);
WeightStore loadWeights(const std::filesystem::path& path);

enum class ChannelOrder { BGR, RGB };

struct PreprocessConfig {
  ChannelOrder order = ChannelOrder::BGR;
  /// Per-channel means, listed in `order`. ImageNet defaults.
  std::array<double, 3> means{103.939, 116.779, 123.68};
};

/// Bilinear resize to 224x224 and mean subtraction, output channels in
/// config.order.
Tensor preprocessImage(const Raster& raster, const PreprocessConfig& config = {});

enum class SourceKind : std::uint8_t { ConvMap = 0, Grayscale = 1 };

const char* toString(SourceKind kind);
SourceKind parseSourceKind(const std::string& name);

struct ConvMapSet {
  Tensor maps;
  SourceKind sourceKind = SourceKind::ConvMap;
};

/// Runs the front section on a 224x224x3 tensor. Output is 56x56x128 and
/// nonnegative.
ConvMapSet forwardToPool2(const Tensor& input, const WeightStore& weights);

/// Grayscale baseline map: luma, resized to `side` x `side` (224 by default).
ConvMapSet grayscaleMapSet(const Raster& raster, std::size_t side = BackboneSpec::kInputSide);

/// CDMD map dump: "CDMD", height u32, width u32, channels u32, f32 data in
/// (y, x, channel) order, CRC32.
std::vector<std::uint8_t> encodeMapDump(const Tensor& maps);
Tensor decodeMapDump(const std::vector<std::uint8_t>& bytes, const std::string& context);

}  // namespace convdesc
