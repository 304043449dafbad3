#include "convdesc/vgg.hpp"

#include <stdexcept>

#include "convdesc/binary_io.hpp"
#include "convdesc/errors.hpp"

namespace convdesc {

void WeightStore::validateShapes() const {
  for (std::size_t i = 0; i < banks.size(); ++i) {
    const auto& want = BackboneSpec::kLayers[i];
    const FilterBank& b = banks[i];
    if (b.kernelCount != want.kernelCount || b.inChannels != want.inChannels ||
        b.kernelHeight != BackboneSpec::kKernelSide ||
        b.kernelWidth != BackboneSpec::kKernelSide) {
      throw FormatError("layer " + std::to_string(i) + " (" + want.name +
                        "): expected shape (" + std::to_string(want.kernelCount) +
                        ", 3, 3, " + std::to_string(want.inChannels) + "), got (" +
                        std::to_string(b.kernelCount) + ", " +
                        std::to_string(b.kernelHeight) + ", " +
                        std::to_string(b.kernelWidth) + ", " +
                        std::to_string(b.inChannels) + ")");
    }
    try {
      b.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError("layer " + std::to_string(i) + " (" + want.name + "): " + e.what());
    }
  }
}

std::vector<std::uint8_t> encodeWeights(const WeightStore& store) {
  store.validateShapes();
  ByteWriter w;
  w.magic("CDWT");
  w.u32(kWeightFormatVersion);
  w.u32(static_cast<std::uint32_t>(store.banks.size()));
  for (std::size_t i = 0; i < store.banks.size(); ++i) {
    const FilterBank& b = store.banks[i];
    w.string(BackboneSpec::kLayers[i].name);
    w.u32(static_cast<std::uint32_t>(b.kernelCount));
    w.u32(static_cast<std::uint32_t>(b.kernelHeight));
    w.u32(static_cast<std::uint32_t>(b.kernelWidth));
    w.u32(static_cast<std::uint32_t>(b.inChannels));
    w.f32s(b.weights);
    w.f32s(b.biases);
  }
  return w.finishWithCrc();
}

WeightStore decodeWeights(const std::vector<std::uint8_t>& bytes,
                          const std::string& sourceName) {
  ByteReader r(bytes, sourceName);
  r.expectMagic("CDWT");
  const std::uint32_t version = r.u32();
  if (version != kWeightFormatVersion) {
    throw FormatError(sourceName + ": unsupported weight format version " +
                      std::to_string(version));
  }
  const std::uint32_t layers = r.u32();
  if (layers != BackboneSpec::kLayers.size()) {
    throw FormatError(sourceName + ": expected 4 layers, found " + std::to_string(layers));
  }
  WeightStore store;
  store.sourceName = sourceName;
  for (std::size_t i = 0; i < layers; ++i) {
    r.string();  // layer name is informational
    FilterBank& b = store.banks[i];
    b.kernelCount = r.u32();
    b.kernelHeight = r.u32();
    b.kernelWidth = r.u32();
    b.inChannels = r.u32();
    const auto& want = BackboneSpec::kLayers[i];
    if (b.kernelCount != want.kernelCount || b.inChannels != want.inChannels ||
        b.kernelHeight != BackboneSpec::kKernelSide ||
        b.kernelWidth != BackboneSpec::kKernelSide) {
      // Report before reading arrays whose size would be wrong.
      store.validateShapes();
    }
    b.weights = r.f32s(b.kernelCount * b.kernelHeight * b.kernelWidth * b.inChannels);
    b.biases = r.f32s(b.kernelCount);
  }
  r.expectEnd();
  store.validateShapes();
  store.checksum = static_cast<std::uint32_t>(bytes[bytes.size() - 4]) |
                   (static_cast<std::uint32_t>(bytes[bytes.size() - 3]) << 8) |
                   (static_cast<std::uint32_t>(bytes[bytes.size() - 2]) << 16) |
                   (static_cast<std::uint32_t>(bytes[bytes.size() - 1]) << 24);
  return store;
}

void saveWeights(const std::filesystem::path& path, const WeightStore& store) {
  writeFileAtomic(path, encodeWeights(store));
}

WeightStore loadWeights(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("weights file not found: " + path.string());
  return decodeWeights(readFileBytes(path), path.string());
}

Tensor preprocessImage(const Raster& raster, const PreprocessConfig& config) {
  if (raster.empty()) throw std::invalid_argument("preprocessImage: zero-size raster");
  Tensor resized = resizeBilinear(rasterToTensor(raster), BackboneSpec::kInputSide,
                                  BackboneSpec::kInputSide);
  Tensor out(BackboneSpec::kInputSide, BackboneSpec::kInputSide, 3);
  for (std::size_t y = 0; y < out.height(); ++y)
    for (std::size_t x = 0; x < out.width(); ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t src = config.order == ChannelOrder::BGR ? 2 - c : c;
        out.at(y, x, c) = static_cast<Real>(
            static_cast<double>(resized.at(y, x, src)) - config.means[c]);
      }
  return out;
}

const char* toString(SourceKind kind) {
  return kind == SourceKind::ConvMap ? "convmap" : "grayscale";
}

SourceKind parseSourceKind(const std::string& name) {
  if (name == "convmap") return SourceKind::ConvMap;
  if (name == "grayscale") return SourceKind::Grayscale;
  throw std::invalid_argument("unknown source '" + name + "' (valid: convmap, grayscale)");
}

ConvMapSet forwardToPool2(const Tensor& input, const WeightStore& weights) {
  constexpr std::size_t side = BackboneSpec::kInputSide;
  if (input.height() != side || input.width() != side || input.channels() != 3) {
    throw std::invalid_argument("forwardToPool2: input must be 224x224x3, got " +
                                std::to_string(input.height()) + "x" +
                                std::to_string(input.width()) + "x" +
                                std::to_string(input.channels()));
  }
  Tensor t = input;
  for (std::size_t i = 0; i < weights.banks.size(); ++i) {
    t = relu(conv2d(t, weights.banks[i], Padding::Same));
    for (std::size_t p : BackboneSpec::kPoolAfter) {
      if (p == i) t = maxpool2(t);
    }
  }
  return {std::move(t), SourceKind::ConvMap};
}

ConvMapSet grayscaleMapSet(const Raster& raster, std::size_t side) {
  if (raster.empty()) throw std::invalid_argument("grayscaleMapSet: zero-size raster");
  return {resizeBilinear(lumaTensor(raster), side, side), SourceKind::Grayscale};
}

std::vector<std::uint8_t> encodeMapDump(const Tensor& maps) {
  ByteWriter w;
  w.magic("CDMD");
  w.u32(static_cast<std::uint32_t>(maps.height()));
  w.u32(static_cast<std::uint32_t>(maps.width()));
  w.u32(static_cast<std::uint32_t>(maps.channels()));
  w.f32s(maps.data());
  return w.finishWithCrc();
}

Tensor decodeMapDump(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r(bytes, context);
  r.expectMagic("CDMD");
  const std::size_t h = r.u32();
  const std::size_t w = r.u32();
  const std::size_t c = r.u32();
  if (h == 0 || w == 0 || c == 0) throw FormatError(context + ": zero map dimension");
  auto data = r.f32s(h * w * c);
  r.expectEnd();
  return Tensor(h, w, c, std::move(data));
}

}  // namespace convdesc
