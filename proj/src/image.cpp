#include "convdesc/image.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <stdexcept>

#include "convdesc/binary_io.hpp"
#include "convdesc/errors.hpp"

namespace convdesc {

namespace {

Raster fromMat(const cv::Mat& bgr) {
  Raster r;
  r.width = static_cast<std::size_t>(bgr.cols);
  r.height = static_cast<std::size_t>(bgr.rows);
  r.rgb.resize(r.width * r.height * 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      auto* px = &r.rgb[(static_cast<std::size_t>(y) * r.width + x) * 3];
      px[0] = row[x][2];
      px[1] = row[x][1];
      px[2] = row[x][0];
    }
  }
  return r;
}

}  // namespace

Raster decodeImage(const std::filesystem::path& path) {
  return decodeImage(readFileBytes(path), path);
}

Raster decodeImage(const std::vector<std::uint8_t>& encoded,
                   const std::filesystem::path& nameForErrors) {
  if (encoded.empty()) throw FormatError("empty image file " + nameForErrors.string());
  cv::Mat mat;
  try {
    mat = cv::imdecode(encoded, cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw FormatError("cannot decode " + nameForErrors.string() + ": " + e.what());
  }
  if (mat.empty()) throw FormatError("cannot decode image " + nameForErrors.string());
  return fromMat(mat);
}

void writeImage(const std::filesystem::path& path, const Raster& raster) {
  if (raster.empty()) throw std::invalid_argument("writeImage: empty raster");
  cv::Mat bgr(static_cast<int>(raster.height), static_cast<int>(raster.width), CV_8UC3);
  for (std::size_t y = 0; y < raster.height; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(static_cast<int>(y));
    for (std::size_t x = 0; x < raster.width; ++x) {
      row[x] = cv::Vec3b(raster.at(y, x, 2), raster.at(y, x, 1), raster.at(y, x, 0));
    }
  }
  std::vector<std::uint8_t> encoded;
  if (!cv::imencode(path.extension().string(), bgr, encoded)) {
    throw IoError("cannot encode image " + path.string());
  }
  writeFileAtomic(path, encoded);
}

Tensor resizeBilinear(const Tensor& input, std::size_t outHeight,
                      std::size_t outWidth) {
  if (input.empty() || outHeight == 0 || outWidth == 0) {
    throw std::invalid_argument("resizeBilinear: zero-size image");
  }
  const std::size_t ih = input.height();
  const std::size_t iw = input.width();
  const std::size_t ch = input.channels();

  struct Tap {
    std::size_t i0, i1;
    double frac;
  };
  auto taps = [](std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = (static_cast<double>(o) + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(in - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(s));
      const std::size_t i1 = std::min(i0 + 1, in - 1);
      t[o] = {i0, i1, s - static_cast<double>(i0)};
    }
    return t;
  };
  const auto ty = taps(ih, outHeight);
  const auto tx = taps(iw, outWidth);

  Tensor out(outHeight, outWidth, ch);
  for (std::size_t y = 0; y < outHeight; ++y) {
    const Tap& a = ty[y];
    for (std::size_t x = 0; x < outWidth; ++x) {
      const Tap& b = tx[x];
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = (1.0 - b.frac) * input.at(a.i0, b.i0, c) +
                           b.frac * input.at(a.i0, b.i1, c);
        const double bottom = (1.0 - b.frac) * input.at(a.i1, b.i0, c) +
                              b.frac * input.at(a.i1, b.i1, c);
        out.at(y, x, c) = static_cast<Real>((1.0 - a.frac) * top + a.frac * bottom);
      }
    }
  }
  return out;
}

Tensor rasterToTensor(const Raster& raster) {
  if (raster.empty()) throw std::invalid_argument("rasterToTensor: zero-size raster");
  std::vector<Real> data(raster.rgb.begin(), raster.rgb.end());
  return Tensor(raster.height, raster.width, 3, std::move(data));
}

Tensor lumaTensor(const Raster& raster) {
  if (raster.empty()) throw std::invalid_argument("lumaTensor: zero-size raster");
  Tensor out(raster.height, raster.width, 1);
  auto dst = out.data();
  for (std::size_t i = 0; i < raster.width * raster.height; ++i) {
    const double y = 0.299 * raster.rgb[i * 3] + 0.587 * raster.rgb[i * 3 + 1] +
                     0.114 * raster.rgb[i * 3 + 2];
    dst[i] = static_cast<Real>(y);
  }
  return out;
}

}  // namespace convdesc
