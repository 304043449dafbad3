#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "convdesc/sift.hpp"
#include "convdesc/vgg.hpp"

namespace convdesc {

struct KMeansMeta {
  std::size_t iterations = 0;
  double finalDistortion = 0.0;
  std::uint64_t seed = 0;
  /// Distortion after each assignment step, in iteration order.
  std::vector<double> distortionHistory;
  bool converged = false;
};

struct Codebook {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<float> centroids;  // k x dim, row-major
  KMeansMeta meta;

  const float* centroid(std::size_t i) const { return centroids.data() + i * dim; }
};

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or maxIters is reached. Empty clusters are re-seeded with the
/// point farthest from its current centroid. Deterministic in (data, k, seed).
/// `descriptors` is count x dim row-major.
Codebook trainCodebook(const std::vector<float>& descriptors, std::size_t dim,
                       std::size_t k, std::size_t maxIters, std::uint64_t seed,
                       std::size_t workers = 1);

/// Seeded uniform subsample of rows without replacement, kept in original
/// order. Returns the input unchanged when it already fits.
std::vector<float> subsampleRows(const std::vector<float>& matrix, std::size_t dim,
                                 std::size_t cap, std::uint64_t seed);

/// Index of the nearest centroid; ties go to the lowest index.
std::size_t nearestCentroid(const Codebook& codebook, const float* row);

enum class FeatureKind : std::uint8_t { Bow = 0, Hlac = 1 };

const char* toString(FeatureKind kind);

struct FeatureVector {
  std::vector<float> values;
  FeatureKind kind = FeatureKind::Bow;
  SourceKind sourceKind = SourceKind::ConvMap;
};

/// Hard assignment of every descriptor, pooled over channels, L1-normalized.
FeatureVector encodeBow(const std::vector<float>& descriptors, const Codebook& codebook,
                        SourceKind sourceKind);
FeatureVector encodeBow(const std::vector<SiftDescriptor>& descriptors,
                        const Codebook& codebook, SourceKind sourceKind);

/// CDCB: "CDCB", k u32, dim u32, centroids f32 row-major, CRC32.
std::vector<std::uint8_t> encodeCodebook(const Codebook& codebook);
Codebook decodeCodebook(const std::vector<std::uint8_t>& bytes, const std::string& context);
void saveCodebook(const std::filesystem::path& path, const Codebook& codebook);
Codebook loadCodebook(const std::filesystem::path& path);

}  // namespace convdesc
