#include "convdesc/bow.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "convdesc/binary_io.hpp"
#include "convdesc/errors.hpp"
#include "convdesc/parallel.hpp"
#include "convdesc/random.hpp"

namespace convdesc {

namespace {

double squaredDistance(const float* a, const double* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = static_cast<double>(a[j]) - b[j];
    s += d * d;
  }
  return s;
}

double squaredDistance(const float* a, const float* b, std::size_t dim) {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    s += d * d;
  }
  return s;
}

struct Assignment {
  std::size_t cluster;
  double distance;
};

Assignment nearest(const float* row, const std::vector<double>& centroids,
                   std::size_t k, std::size_t dim) {
  Assignment best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < k; ++c) {
    const double d = squaredDistance(row, centroids.data() + c * dim, dim);
    if (d < best.distance) best = {c, d};
  }
  return best;
}

}  // namespace

Codebook trainCodebook(const std::vector<float>& descriptors, std::size_t dim,
                       std::size_t k, std::size_t maxIters, std::uint64_t seed,
                       std::size_t workers) {
  if (dim == 0 || descriptors.size() % dim != 0) {
    throw std::invalid_argument("trainCodebook: descriptor matrix is not a multiple of dim");
  }
  const std::size_t n = descriptors.size() / dim;
  if (k == 0) throw std::invalid_argument("trainCodebook: k must be positive");
  if (n < k) {
    throw std::invalid_argument("trainCodebook: " + std::to_string(n) +
                                " descriptors is fewer than k = " + std::to_string(k));
  }
  if (maxIters == 0) throw std::invalid_argument("trainCodebook: maxIters must be positive");
  auto row = [&](std::size_t i) { return descriptors.data() + i * dim; };

  // k-means++ seeding.
  Rng rng(seed);
  std::vector<double> centroids(k * dim);
  auto setCentroid = [&](std::size_t c, std::size_t point) {
    std::copy(row(point), row(point) + dim, centroids.begin() + static_cast<long>(c * dim));
  };
  setCentroid(0, static_cast<std::size_t>(uniformIndex(rng, n)));
  std::vector<double> minDist(n);
  for (std::size_t i = 0; i < n; ++i) minDist[i] = squaredDistance(row(i), centroids.data(), dim);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(minDist.begin(), minDist.end(), 0.0);
    if (!(total > 0.0)) {
      throw std::invalid_argument("trainCodebook: only " + std::to_string(c) +
                                  " distinct descriptors, fewer than k = " + std::to_string(k));
    }
    const double target = uniform01(rng) * total;
    double cum = 0.0;
    std::size_t pick = n;
    std::size_t lastPositive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (minDist[i] <= 0.0) continue;
      lastPositive = i;
      cum += minDist[i];
      if (cum > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) pick = lastPositive;
    setCentroid(c, pick);
    const double* cen = centroids.data() + c * dim;
    for (std::size_t i = 0; i < n; ++i) {
      minDist[i] = std::min(minDist[i], squaredDistance(row(i), cen, dim));
    }
  }

  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.meta.seed = seed;

  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> assign(n, kUnassigned);
  std::vector<double> dist(n);
  const std::size_t chunk = 4096;
  const std::size_t chunks = (n + chunk - 1) / chunk;

  for (std::size_t iter = 1; iter <= maxIters; ++iter) {
    std::vector<char> chunkChanged(chunks, 0);
    parallelFor(chunks, workers, [&](std::size_t ci) {
      const std::size_t end = std::min(n, (ci + 1) * chunk);
      for (std::size_t i = ci * chunk; i < end; ++i) {
        const Assignment a = nearest(row(i), centroids, k, dim);
        if (a.cluster != assign[i]) chunkChanged[ci] = 1;
        assign[i] = a.cluster;
        dist[i] = a.distance;
      }
    });
    const bool changed = std::any_of(chunkChanged.begin(), chunkChanged.end(),
                                     [](char c) { return c != 0; });
    const double distortion = std::accumulate(dist.begin(), dist.end(), 0.0);
    cb.meta.distortionHistory.push_back(distortion);
    cb.meta.iterations = iter;
    cb.meta.finalDistortion = distortion;
    if (!changed) {
      cb.meta.converged = true;
      break;
    }
    if (iter == maxIters) break;

    // Centroid update as an ordered reduction.
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* s = sums.data() + assign[i] * dim;
      const float* r = row(i);
      for (std::size_t j = 0; j < dim; ++j) s[j] += r[j];
      ++counts[assign[i]];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        empty.push_back(c);
        continue;
      }
      for (std::size_t j = 0; j < dim; ++j) {
        centroids[c * dim + j] = sums[c * dim + j] / static_cast<double>(counts[c]);
      }
    }
    if (!empty.empty()) {
      std::vector<double> toOwn(n);
      for (std::size_t i = 0; i < n; ++i) {
        toOwn[i] = squaredDistance(row(i), centroids.data() + assign[i] * dim, dim);
      }
      for (std::size_t c : empty) {
        const auto far = static_cast<std::size_t>(
            std::max_element(toOwn.begin(), toOwn.end()) - toOwn.begin());
        if (!(toOwn[far] > 0.0)) break;
        setCentroid(c, far);
        toOwn[far] = 0.0;
      }
    }
  }

  cb.centroids.assign(centroids.begin(), centroids.end());
  return cb;
}

std::vector<float> subsampleRows(const std::vector<float>& matrix, std::size_t dim,
                                 std::size_t cap, std::uint64_t seed) {
  if (dim == 0 || matrix.size() % dim != 0) {
    throw std::invalid_argument("subsampleRows: matrix is not a multiple of dim");
  }
  const std::size_t n = matrix.size() / dim;
  if (n <= cap) return matrix;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto j = i + static_cast<std::size_t>(uniformIndex(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<float> out;
  out.reserve(cap * dim);
  for (std::size_t i : idx) {
    out.insert(out.end(), matrix.begin() + static_cast<long>(i * dim),
               matrix.begin() + static_cast<long>((i + 1) * dim));
  }
  return out;
}

std::size_t nearestCentroid(const Codebook& codebook, const float* row) {
  std::size_t best = 0;
  double bestDist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.k; ++c) {
    const double d = squaredDistance(row, codebook.centroid(c), codebook.dim);
    if (d < bestDist) {
      bestDist = d;
      best = c;
    }
  }
  return best;
}

const char* toString(FeatureKind kind) { return kind == FeatureKind::Bow ? "bow" : "hlac"; }

FeatureVector encodeBow(const std::vector<float>& descriptors, const Codebook& codebook,
                        SourceKind sourceKind) {
  if (codebook.k == 0 || codebook.dim == 0) throw std::invalid_argument("encodeBow: empty codebook");
  if (descriptors.size() % codebook.dim != 0) {
    throw std::invalid_argument("encodeBow: descriptor width does not match codebook dim");
  }
  const std::size_t n = descriptors.size() / codebook.dim;
  if (n == 0) throw std::invalid_argument("encodeBow: no descriptors to encode");
  std::vector<std::size_t> counts(codebook.k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[nearestCentroid(codebook, descriptors.data() + i * codebook.dim)];
  }
  FeatureVector fv;
  fv.kind = FeatureKind::Bow;
  fv.sourceKind = sourceKind;
  fv.values.resize(codebook.k);
  for (std::size_t c = 0; c < codebook.k; ++c) {
    fv.values[c] = static_cast<float>(static_cast<double>(counts[c]) / static_cast<double>(n));
  }
  return fv;
}

FeatureVector encodeBow(const std::vector<SiftDescriptor>& descriptors,
                        const Codebook& codebook, SourceKind sourceKind) {
  if (codebook.dim != kSiftDim) throw std::invalid_argument("encodeBow: codebook dim must be 128");
  return encodeBow(descriptorMatrix(descriptors), codebook, sourceKind);
}

std::vector<std::uint8_t> encodeCodebook(const Codebook& codebook) {
  if (codebook.centroids.size() != codebook.k * codebook.dim) {
    throw std::invalid_argument("encodeCodebook: centroid array does not match k x dim");
  }
  ByteWriter w;
  w.magic("CDCB");
  w.u32(static_cast<std::uint32_t>(codebook.k));
  w.u32(static_cast<std::uint32_t>(codebook.dim));
  w.f32s(codebook.centroids);
  return w.finishWithCrc();
}

Codebook decodeCodebook(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r(bytes, context);
  r.expectMagic("CDCB");
  Codebook cb;
  cb.k = r.u32();
  cb.dim = r.u32();
  if (cb.k == 0 || cb.dim == 0) throw FormatError(context + ": zero codebook size");
  cb.centroids = r.f32s(cb.k * cb.dim);
  r.expectEnd();
  return cb;
}

void saveCodebook(const std::filesystem::path& path, const Codebook& codebook) {
  writeFileAtomic(path, encodeCodebook(codebook));
}

Codebook loadCodebook(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("codebook file not found: " + path.string());
  return decodeCodebook(readFileBytes(path), path.string());
}

}  // namespace convdesc
