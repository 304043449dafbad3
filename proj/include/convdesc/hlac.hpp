#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "convdesc/bow.hpp"
#include "convdesc/tensor.hpp"
#include "convdesc/vgg.hpp"

namespace convdesc {

struct Offset {
  int dy = 0;
  int dx = 0;
  auto operator<=>(const Offset&) const = default;
};

/// Displacements from the reference pixel, sorted, always containing (0, 0).
struct HlacMask {
  std::vector<Offset> offsets;
  std::size_t order() const { return offsets.size() - 1; }
  auto operator<=>(const HlacMask&) const = default;
};

inline constexpr std::size_t kHlacDim = 25;

struct HlacMaskSet {
  std::vector<HlacMask> masks;
};

/// All order <= 2 masks in the 3x3 window, one per translation class.
/// Each class is represented by its lexicographically smallest translate
/// that contains (0, 0) and fits the window; masks are ordered by order, then
/// lexicographically.
HlacMaskSet enumerateMasks();

/// Otsu's threshold on a 256-bin histogram spanning [min, max]. The returned
/// value is the lower edge of the first bin of the upper class, so
/// `binarize` with it splits the map between the chosen bins. A constant map
/// returns its value.
double otsuThreshold(const Tensor& map);

/// Histogram bin in [0, 255] used by otsuThreshold for a value of the map
/// spanning [lo, hi], hi > lo.
std::size_t otsuBin(double value, double lo, double hi);

struct BinaryMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> bits;
  double threshold = 0.0;
  std::size_t channelIndex = 0;

  std::uint8_t at(std::size_t y, std::size_t x) const { return bits[y * width + x]; }
};

/// bit = 1 iff value > threshold.
BinaryMap binarize(const Tensor& map, double threshold, std::size_t channelIndex = 0);

/// Co-occurrence counts over interior reference pixels (every offset stays
/// inside the map).
std::array<std::uint32_t, kHlacDim> hlac25(const BinaryMap& map, const HlacMaskSet& masks);

/// Per channel: Otsu threshold, binarize, hlac25; concatenated channel-major.
FeatureVector hlacConcat(const ConvMapSet& maps, std::size_t workers = 1);

}  // namespace convdesc
