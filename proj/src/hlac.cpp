#include "convdesc/hlac.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "convdesc/parallel.hpp"

namespace convdesc {

namespace {

std::vector<Offset> neighbours() {
  std::vector<Offset> n;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if (dy != 0 || dx != 0) n.push_back({dy, dx});
  return n;
}

bool inWindow(const Offset& o) { return std::abs(o.dy) <= 1 && std::abs(o.dx) <= 1; }

// Translation-invariant key: shift so the bounding box starts at (0, 0).
std::vector<Offset> anchorKey(std::vector<Offset> pts) {
  int minY = pts[0].dy;
  int minX = pts[0].dx;
  for (const auto& p : pts) {
    minY = std::min(minY, p.dy);
    minX = std::min(minX, p.dx);
  }
  for (auto& p : pts) p = {p.dy - minY, p.dx - minX};
  std::sort(pts.begin(), pts.end());
  return pts;
}

HlacMask representative(const std::vector<Offset>& pts) {
  // Translating by -p puts point p on the reference pixel.
  HlacMask best;
  bool found = false;
  for (const auto& anchor : pts) {
    HlacMask m;
    bool fits = true;
    for (const auto& p : pts) {
      const Offset o{p.dy - anchor.dy, p.dx - anchor.dx};
      if (!inWindow(o)) {
        fits = false;
        break;
      }
      m.offsets.push_back(o);
    }
    if (!fits) continue;
    std::sort(m.offsets.begin(), m.offsets.end());
    if (!found || m < best) {
      best = std::move(m);
      found = true;
    }
  }
  return best;
}

}  // namespace

HlacMaskSet enumerateMasks() {
  const auto nb = neighbours();
  std::set<std::vector<Offset>> seen;
  std::vector<HlacMask> masks;
  auto consider = [&](std::vector<Offset> pts) {
    if (seen.insert(anchorKey(pts)).second) masks.push_back(representative(pts));
  };
  consider({{0, 0}});
  for (std::size_t i = 0; i < nb.size(); ++i) consider({{0, 0}, nb[i]});
  for (std::size_t i = 0; i < nb.size(); ++i)
    for (std::size_t j = i + 1; j < nb.size(); ++j) consider({{0, 0}, nb[i], nb[j]});

  std::sort(masks.begin(), masks.end(), [](const HlacMask& a, const HlacMask& b) {
    if (a.offsets.size() != b.offsets.size()) return a.offsets.size() < b.offsets.size();
    return a.offsets < b.offsets;
  });
  return {std::move(masks)};
}

std::size_t otsuBin(double value, double lo, double hi) {
  const double scaled = (value - lo) / (hi - lo) * 256.0;
  if (!(scaled > 0.0)) return 0;
  return std::min<std::size_t>(255, static_cast<std::size_t>(scaled));
}

double otsuThreshold(const Tensor& map) {
  if (map.empty()) throw std::invalid_argument("otsuThreshold: empty map");
  const auto data = map.data();
  const auto [mnIt, mxIt] = std::minmax_element(data.begin(), data.end());
  const double lo = *mnIt;
  const double hi = *mxIt;
  if (!(hi > lo)) return lo;

  std::array<double, 256> hist{};
  for (Real v : data) hist[otsuBin(v, lo, hi)] += 1.0;
  const double total = static_cast<double>(data.size());

  double sumAll = 0.0;
  for (std::size_t i = 0; i < 256; ++i) sumAll += static_cast<double>(i) * hist[i];

  double bestVar = -1.0;
  std::size_t bestSplit = 1;
  double w0 = 0.0;
  double sum0 = 0.0;
  for (std::size_t t = 1; t < 256; ++t) {
    w0 += hist[t - 1];
    sum0 += static_cast<double>(t - 1) * hist[t - 1];
    const double w1 = total - w0;
    double var = 0.0;
    if (w0 > 0.0 && w1 > 0.0) {
      const double mu0 = sum0 / w0;
      const double mu1 = (sumAll - sum0) / w1;
      var = (w0 / total) * (w1 / total) * (mu0 - mu1) * (mu0 - mu1);
    }
    if (var > bestVar) {
      bestVar = var;
      bestSplit = t;
    }
  }
  return lo + static_cast<double>(bestSplit) * (hi - lo) / 256.0;
}

BinaryMap binarize(const Tensor& map, double threshold, std::size_t channelIndex) {
  if (map.channels() != 1) throw std::invalid_argument("binarize: expects one channel");
  BinaryMap b;
  b.height = map.height();
  b.width = map.width();
  b.threshold = threshold;
  b.channelIndex = channelIndex;
  b.bits.resize(map.size());
  const auto data = map.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    b.bits[i] = static_cast<double>(data[i]) > threshold ? 1 : 0;
  }
  return b;
}

std::array<std::uint32_t, kHlacDim> hlac25(const BinaryMap& map, const HlacMaskSet& masks) {
  if (masks.masks.size() != kHlacDim) {
    throw std::invalid_argument("hlac25: expected 25 masks, got " + std::to_string(masks.masks.size()));
  }
  if (map.height < 3 || map.width < 3) throw std::invalid_argument("hlac25: map smaller than 3x3");

  std::array<std::uint32_t, kHlacDim> out{};
  for (std::size_t y = 1; y + 1 < map.height; ++y) {
    for (std::size_t x = 1; x + 1 < map.width; ++x) {
      if (!map.at(y, x)) continue;  // every mask contains the reference pixel
      for (std::size_t m = 0; m < kHlacDim; ++m) {
        bool all = true;
        for (const Offset& o : masks.masks[m].offsets) {
          if (!map.at(y + o.dy, x + o.dx)) {
            all = false;
            break;
          }
        }
        out[m] += all ? 1u : 0u;
      }
    }
  }
  return out;
}

FeatureVector hlacConcat(const ConvMapSet& maps, std::size_t workers) {
  const Tensor& t = maps.maps;
  if (t.empty()) throw std::invalid_argument("hlacConcat: empty map set");
  const HlacMaskSet masks = enumerateMasks();
  FeatureVector fv;
  fv.kind = FeatureKind::Hlac;
  fv.sourceKind = maps.sourceKind;
  fv.values.resize(t.channels() * kHlacDim);
  parallelFor(t.channels(), workers, [&](std::size_t c) {
    const Tensor ch = t.channel(c);
    const auto counts = hlac25(binarize(ch, otsuThreshold(ch), c), masks);
    for (std::size_t m = 0; m < kHlacDim; ++m) {
      fv.values[c * kHlacDim + m] = static_cast<float>(counts[m]);
    }
  });
  return fv;
}

}  // namespace convdesc
