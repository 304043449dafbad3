#include "convdesc/sift.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "convdesc/binary_io.hpp"
#include "convdesc/errors.hpp"

namespace convdesc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kClamp = 0.2;
}  // namespace

void DenseGridParams::validate() const {
  if (patchSize < 4 || patchSize % 4 != 0) {
    throw std::invalid_argument("patch size must be >= 4 and divisible by 4, got " +
                                std::to_string(patchSize));
  }
  if (step < 1) throw std::invalid_argument("grid step must be >= 1");
}

GradientField gradientField(const Tensor& map) {
  if (map.channels() != 1) throw std::invalid_argument("gradientField: expects one channel");
  const std::size_t h = map.height();
  const std::size_t w = map.width();
  if (h < 3 || w < 3) throw std::invalid_argument("gradientField: map smaller than 3x3");

  GradientField g{Tensor(h, w, 1), Tensor(h, w, 1)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double gx;
      if (x == 0) gx = double(map.at(y, 1, 0)) - map.at(y, 0, 0);
      else if (x == w - 1) gx = double(map.at(y, w - 1, 0)) - map.at(y, w - 2, 0);
      else gx = 0.5 * (double(map.at(y, x + 1, 0)) - map.at(y, x - 1, 0));

      double gy;
      if (y == 0) gy = double(map.at(1, x, 0)) - map.at(0, x, 0);
      else if (y == h - 1) gy = double(map.at(h - 1, x, 0)) - map.at(h - 2, x, 0);
      else gy = 0.5 * (double(map.at(y + 1, x, 0)) - map.at(y - 1, x, 0));

      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += kTwoPi;
      if (theta >= kTwoPi) theta = 0.0;
      g.magnitude.at(y, x, 0) = static_cast<Real>(std::hypot(gx, gy));
      g.orientation.at(y, x, 0) = static_cast<Real>(theta);
    }
  }
  return g;
}

std::array<double, kSiftDim> siftPatchHistogram(const GradientField& field,
                                                std::size_t top, std::size_t left,
                                                std::size_t patchSize) {
  std::array<double, kSiftDim> hist{};
  const double cell = static_cast<double>(patchSize) / kSiftCells;
  const auto cells = static_cast<long>(kSiftCells);
  const auto bins = static_cast<long>(kSiftOrientations);

  for (std::size_t dy = 0; dy < patchSize; ++dy) {
    // Position in cell units, measured from the first cell's center.
    const double cy = (static_cast<double>(dy) + 0.5) / cell - 0.5;
    const long cy0 = static_cast<long>(std::floor(cy));
    const double fy = cy - static_cast<double>(cy0);
    for (std::size_t dx = 0; dx < patchSize; ++dx) {
      const double mag = field.magnitude.at(top + dy, left + dx, 0);
      if (mag == 0.0) continue;
      const double cx = (static_cast<double>(dx) + 0.5) / cell - 0.5;
      const long cx0 = static_cast<long>(std::floor(cx));
      const double fx = cx - static_cast<double>(cx0);

      const double o = field.orientation.at(top + dy, left + dx, 0) / kTwoPi * bins;
      long o0 = static_cast<long>(std::floor(o));
      const double fo = o - static_cast<double>(o0);
      o0 = ((o0 % bins) + bins) % bins;
      const long o1 = (o0 + 1) % bins;

      for (int sy = 0; sy < 2; ++sy) {
        const long iy = cy0 + sy;
        if (iy < 0 || iy >= cells) continue;
        const double wy = sy ? fy : 1.0 - fy;
        for (int sx = 0; sx < 2; ++sx) {
          const long ix = cx0 + sx;
          if (ix < 0 || ix >= cells) continue;
          const double wxy = wy * (sx ? fx : 1.0 - fx) * mag;
          const std::size_t base = static_cast<std::size_t>(iy * cells + ix) * kSiftOrientations;
          hist[base + static_cast<std::size_t>(o0)] += wxy * (1.0 - fo);
          hist[base + static_cast<std::size_t>(o1)] += wxy * fo;
        }
      }
    }
  }
  return hist;
}

std::array<float, kSiftDim> normalizeSift(const std::array<double, kSiftDim>& hist) {
  std::array<float, kSiftDim> out{};
  double norm = 0.0;
  for (double v : hist) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return out;

  std::array<double, kSiftDim> clamped{};
  double norm2 = 0.0;
  for (std::size_t i = 0; i < kSiftDim; ++i) {
    clamped[i] = std::min(hist[i] / norm, kClamp);
    norm2 += clamped[i] * clamped[i];
  }
  norm2 = std::sqrt(norm2);
  for (std::size_t i = 0; i < kSiftDim; ++i) {
    out[i] = static_cast<float>(clamped[i] / norm2);
  }
  return out;
}

std::size_t denseGridCount(std::size_t extent, std::size_t patchSize, std::size_t step) {
  if (patchSize > extent || step == 0) return 0;
  return (extent - patchSize) / step + 1;
}

std::vector<SiftDescriptor> denseSift(const ConvMapSet& maps, const DenseGridParams& grid) {
  grid.validate();
  const Tensor& t = maps.maps;
  if (t.empty()) throw std::invalid_argument("denseSift: empty map set");
  if (grid.patchSize > std::min(t.height(), t.width())) {
    throw std::invalid_argument("denseSift: patch size " + std::to_string(grid.patchSize) +
                                " exceeds map size " + std::to_string(t.height()) + "x" +
                                std::to_string(t.width()));
  }
  const std::size_t ny = denseGridCount(t.height(), grid.patchSize, grid.step);
  const std::size_t nx = denseGridCount(t.width(), grid.patchSize, grid.step);

  std::vector<SiftDescriptor> out;
  out.reserve(t.channels() * ny * nx);
  for (std::size_t c = 0; c < t.channels(); ++c) {
    const GradientField field = gradientField(t.channel(c));
    for (std::size_t gy = 0; gy < ny; ++gy) {
      for (std::size_t gx = 0; gx < nx; ++gx) {
        SiftDescriptor d;
        const std::size_t top = gy * grid.step;
        const std::size_t left = gx * grid.step;
        d.values = normalizeSift(siftPatchHistogram(field, top, left, grid.patchSize));
        d.y = top + grid.patchSize / 2;
        d.x = left + grid.patchSize / 2;
        d.channelIndex = c;
        out.push_back(d);
      }
    }
  }
  return out;
}

std::vector<float> descriptorMatrix(const std::vector<SiftDescriptor>& descriptors) {
  std::vector<float> m;
  m.reserve(descriptors.size() * kSiftDim);
  for (const auto& d : descriptors) m.insert(m.end(), d.values.begin(), d.values.end());
  return m;
}

std::vector<std::uint8_t> encodeDescriptorDump(const std::vector<float>& matrix,
                                               std::size_t dim) {
  if (dim == 0 || matrix.size() % dim != 0) {
    throw std::invalid_argument("descriptor matrix size is not a multiple of dim");
  }
  ByteWriter w;
  w.magic("CDSD");
  w.u32(static_cast<std::uint32_t>(matrix.size() / dim));
  w.u32(static_cast<std::uint32_t>(dim));
  w.f32s(matrix);
  return w.finishWithCrc();
}

std::vector<float> decodeDescriptorDump(const std::vector<std::uint8_t>& bytes,
                                        const std::string& context) {
  ByteReader r(bytes, context);
  r.expectMagic("CDSD");
  const std::size_t count = r.u32();
  const std::size_t dim = r.u32();
  if (dim != kSiftDim) throw FormatError(context + ": descriptor dim " + std::to_string(dim) + ", expected 128");
  auto m = r.f32s(count * dim);
  r.expectEnd();
  return m;
}

}  // namespace convdesc
