#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace convdesc {

using Real = float;

/// Dense height x width x channels array, row-major in (y, x, channel).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t height, std::size_t width, std::size_t channels,
         Real fill = 0.0f);
  Tensor(std::size_t height, std::size_t width, std::size_t channels,
         std::vector<Real> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Real& at(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * width_ + x) * channels_ + c];
  }
  Real at(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * width_ + x) * channels_ + c];
  }

  std::span<Real> data() { return data_; }
  std::span<const Real> data() const { return data_; }

  /// Copies one channel out as an H x W x 1 tensor.
  Tensor channel(std::size_t c) const;

  bool allFinite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<Real> data_;
};

/// Convolution weights indexed (kernel, ky, kx, cin), one scalar bias per kernel.
struct FilterBank {
  std::size_t kernelCount = 0;
  std::size_t kernelHeight = 0;
  std::size_t kernelWidth = 0;
  std::size_t inChannels = 0;
  std::vector<Real> weights;
  std::vector<Real> biases;

  Real weight(std::size_t k, std::size_t ky, std::size_t kx,
              std::size_t cin) const {
    return weights[((k * kernelHeight + ky) * kernelWidth + kx) * inChannels +
                   cin];
  }

  /// Throws std::invalid_argument if array lengths disagree with the shape
  /// or any value is non-finite.
  void validate() const;

  friend bool operator==(const FilterBank&, const FilterBank&) = default;
};

enum class Padding { Same, Valid };

/// Stride-1 cross-correlation plus per-kernel bias. Same padding zero-pads so
/// the spatial size is preserved (odd kernel sizes only).
Tensor conv2d(const Tensor& input, const FilterBank& bank,
              Padding padding = Padding::Same);

Tensor relu(const Tensor& input);

/// Non-overlapping 2x2 max pooling. Odd spatial sizes are rejected.
Tensor maxpool2(const Tensor& input);

}  // namespace convdesc
