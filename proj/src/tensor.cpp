#include "convdesc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace convdesc {

namespace {

void requirePositive(std::size_t h, std::size_t w, std::size_t c) {
  if (h == 0 || w == 0 || c == 0) {
    throw std::invalid_argument("tensor dimensions must be positive, got " +
                                std::to_string(h) + "x" + std::to_string(w) +
                                "x" + std::to_string(c));
  }
}

}  // namespace

Tensor::Tensor(std::size_t height, std::size_t width, std::size_t channels,
               Real fill)
    : height_(height), width_(width), channels_(channels) {
  requirePositive(height, width, channels);
  data_.assign(height * width * channels, fill);
}

Tensor::Tensor(std::size_t height, std::size_t width, std::size_t channels,
               std::vector<Real> data)
    : height_(height), width_(width), channels_(channels),
      data_(std::move(data)) {
  requirePositive(height, width, channels);
  if (data_.size() != height * width * channels) {
    throw std::invalid_argument("tensor data length " +
                                std::to_string(data_.size()) +
                                " does not match shape");
  }
}

Tensor Tensor::channel(std::size_t c) const {
  if (c >= channels_) throw std::invalid_argument("channel index out of range");
  Tensor out(height_, width_, 1);
  for (std::size_t i = 0; i < height_ * width_; ++i) {
    out.data_[i] = data_[i * channels_ + c];
  }
  return out;
}

bool Tensor::allFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](Real v) { return std::isfinite(v); });
}

void FilterBank::validate() const {
  if (kernelCount == 0 || kernelHeight == 0 || kernelWidth == 0 ||
      inChannels == 0) {
    throw std::invalid_argument("filter bank dimensions must be positive");
  }
  if (weights.size() != kernelCount * kernelHeight * kernelWidth * inChannels) {
    throw std::invalid_argument("filter bank weight count does not match shape");
  }
  if (biases.size() != kernelCount) {
    throw std::invalid_argument("filter bank bias count does not match kernelCount");
  }
  auto finite = [](Real v) { return std::isfinite(v); };
  if (!std::all_of(weights.begin(), weights.end(), finite) ||
      !std::all_of(biases.begin(), biases.end(), finite)) {
    throw std::invalid_argument("filter bank contains non-finite values");
  }
}

Tensor conv2d(const Tensor& input, const FilterBank& bank, Padding padding) {
  bank.validate();
  if (input.empty()) throw std::invalid_argument("conv2d: empty input");
  if (input.channels() != bank.inChannels) {
    throw std::invalid_argument(
        "conv2d: input has " + std::to_string(input.channels()) +
        " channels, filter bank expects " + std::to_string(bank.inChannels));
  }

  const std::size_t kh = bank.kernelHeight;
  const std::size_t kw = bank.kernelWidth;
  const std::size_t cin = bank.inChannels;
  const std::size_t kc = bank.kernelCount;

  std::ptrdiff_t padY = 0;
  std::ptrdiff_t padX = 0;
  std::size_t outH = 0;
  std::size_t outW = 0;
  if (padding == Padding::Same) {
    if (kh % 2 == 0 || kw % 2 == 0) {
      throw std::invalid_argument("conv2d: same padding needs odd kernel sizes");
    }
    padY = static_cast<std::ptrdiff_t>(kh / 2);
    padX = static_cast<std::ptrdiff_t>(kw / 2);
    outH = input.height();
    outW = input.width();
  } else {
    if (input.height() < kh || input.width() < kw) {
      throw std::invalid_argument("conv2d: kernel larger than input");
    }
    outH = input.height() - kh + 1;
    outW = input.width() - kw + 1;
  }

  // Repack to (ky, kx, cin, k) so the innermost loop runs over output kernels
  // with an independent accumulator each; summation order per element is fixed.
  std::vector<double> packed(kh * kw * cin * kc);
  for (std::size_t k = 0; k < kc; ++k)
    for (std::size_t ky = 0; ky < kh; ++ky)
      for (std::size_t kx = 0; kx < kw; ++kx)
        for (std::size_t c = 0; c < cin; ++c)
          packed[((ky * kw + kx) * cin + c) * kc + k] = bank.weight(k, ky, kx, c);

  Tensor out(outH, outW, kc);
  std::vector<double> acc(kc);
  const auto inH = static_cast<std::ptrdiff_t>(input.height());
  const auto inW = static_cast<std::ptrdiff_t>(input.width());
  const auto in = input.data();
  auto dst = out.data();

  for (std::size_t oy = 0; oy < outH; ++oy) {
    for (std::size_t ox = 0; ox < outW; ++ox) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t ky = 0; ky < kh; ++ky) {
        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - padY;
        if (iy < 0 || iy >= inH) continue;
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - padX;
          if (ix < 0 || ix >= inW) continue;
          const Real* px = &in[(static_cast<std::size_t>(iy) * input.width() +
                                static_cast<std::size_t>(ix)) * cin];
          const double* wrow = &packed[(ky * kw + kx) * cin * kc];
          for (std::size_t c = 0; c < cin; ++c) {
            const double v = px[c];
            const double* w = wrow + c * kc;
            for (std::size_t k = 0; k < kc; ++k) acc[k] += w[k] * v;
          }
        }
      }
      Real* o = &dst[(oy * outW + ox) * kc];
      for (std::size_t k = 0; k < kc; ++k) {
        o[k] = static_cast<Real>(acc[k] + static_cast<double>(bank.biases[k]));
      }
    }
  }
  return out;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (Real& v : out.data()) v = v > 0.0f ? v : 0.0f;
  return out;
}

Tensor maxpool2(const Tensor& input) {
  if (input.empty()) throw std::invalid_argument("maxpool2: empty input");
  if (input.height() % 2 != 0 || input.width() % 2 != 0) {
    throw std::invalid_argument("maxpool2: odd spatial size " +
                                std::to_string(input.height()) + "x" +
                                std::to_string(input.width()));
  }
  const std::size_t oh = input.height() / 2;
  const std::size_t ow = input.width() / 2;
  const std::size_t ch = input.channels();
  Tensor out(oh, ow, ch);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x)
      for (std::size_t c = 0; c < ch; ++c) {
        Real m = input.at(2 * y, 2 * x, c);
        m = std::max(m, input.at(2 * y, 2 * x + 1, c));
        m = std::max(m, input.at(2 * y + 1, 2 * x, c));
        m = std::max(m, input.at(2 * y + 1, 2 * x + 1, c));
        out.at(y, x, c) = m;
      }
  return out;
}

}  // namespace convdesc
