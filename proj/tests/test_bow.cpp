#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "convdesc/bow.hpp"
#include "convdesc/errors.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace convdesc;

namespace {

std::vector<float> randomRows(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> m(n * dim);
  for (auto& v : m) v = u(rng);
  return m;
}

}  // namespace

TEST_CASE("k equal to the number of distinct points") {
  std::mt19937_64 rng(4);
  const std::size_t dim = kSiftDim;
  const auto points = randomRows(rng, 6, dim);
  std::vector<float> data;
  for (int rep = 0; rep < 5; ++rep) data.insert(data.end(), points.begin(), points.end());

  const Codebook cb = trainCodebook(data, dim, 6, 50, 1);
  CHECK(cb.meta.finalDistortion == 0.0);
  std::set<std::vector<float>> want, got;
  for (std::size_t i = 0; i < 6; ++i) {
    want.emplace(points.begin() + i * dim, points.begin() + (i + 1) * dim);
    got.emplace(cb.centroid(i), cb.centroid(i) + dim);
  }
  CHECK(got == want);

  CHECK_THROWS_AS(trainCodebook(data, dim, 7, 50, 1), std::invalid_argument);
  CHECK_THROWS_AS(trainCodebook(points, dim, 7, 50, 1), std::invalid_argument);
}

TEST_CASE("two separated clouds") {
  std::mt19937_64 rng(7);
  const std::size_t dim = kSiftDim;
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<float> data;
  std::vector<double> meanA(dim, 0.0), meanB(dim, 0.0);
  const std::size_t per = 50;
  for (std::size_t i = 0; i < 2 * per; ++i) {
    const bool a = i % 2 == 0;
    for (std::size_t j = 0; j < dim; ++j) {
      const auto v = static_cast<float>((a ? 0.0 : 2.0) + noise(rng));
      data.push_back(v);
      (a ? meanA : meanB)[j] += v;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    meanA[j] /= per;
    meanB[j] /= per;
  }
  const Codebook cb = trainCodebook(data, dim, 2, 100, 3);
  CHECK(cb.meta.converged);
  const bool firstIsA = cb.centroid(0)[0] < 1.0f;
  const float* ca = cb.centroid(firstIsA ? 0 : 1);
  const float* cbB = cb.centroid(firstIsA ? 1 : 0);
  for (std::size_t j = 0; j < dim; ++j) {
    CHECK(std::abs(ca[j] - meanA[j]) <= 1e-6);
    CHECK(std::abs(cbB[j] - meanB[j]) <= 1e-6);
  }
}

TEST_CASE("distortion never increases") {
  std::mt19937_64 rng(12);
  const std::size_t dim = 16;
  const auto data = randomRows(rng, 400, dim);
  const Codebook full = trainCodebook(data, dim, 12, 40, 5);
  for (std::size_t i = 1; i < full.meta.distortionHistory.size(); ++i) {
    CHECK(full.meta.distortionHistory[i] <= full.meta.distortionHistory[i - 1]);
  }
  CHECK(full.meta.finalDistortion ==
        doctest::Approx(oracle::kmeansDistortion(data, full.centroids, dim)).epsilon(1e-5));

  // Independent recomputation: stopping after i iterations returns the
  // centroids that produced the i-th assignment.
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t iters = 1; iters <= full.meta.iterations; ++iters) {
    const Codebook cb = trainCodebook(data, dim, 12, iters, 5);
    const double d = oracle::kmeansDistortion(data, cb.centroids, dim);
    CHECK(d <= previous * (1 + 1e-6));
    previous = d;
  }
}

TEST_CASE("seeded training is reproducible") {
  std::mt19937_64 rng(21);
  const auto data = randomRows(rng, 3000, kSiftDim);
  const Codebook a = trainCodebook(data, kSiftDim, 10, 30, 99, 1);
  const Codebook b = trainCodebook(data, kSiftDim, 10, 30, 99, 3);
  CHECK(encodeCodebook(a) == encodeCodebook(b));
  CHECK(a.meta.distortionHistory == b.meta.distortionHistory);
  const Codebook c = trainCodebook(data, kSiftDim, 10, 30, 100, 1);
  CHECK(encodeCodebook(a) != encodeCodebook(c));

  std::set<std::vector<float>> unique;
  for (std::size_t i = 0; i < a.k; ++i) unique.emplace(a.centroid(i), a.centroid(i) + a.dim);
  CHECK(unique.size() == a.k);
}

TEST_CASE("subsampling") {
  std::vector<float> m(40);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = float(i);
  CHECK(subsampleRows(m, 2, 50, 1) == m);
  const auto s = subsampleRows(m, 2, 5, 1);
  CHECK(s.size() == 10);
  for (std::size_t i = 0; i < 5; ++i) CHECK(int(s[2 * i]) % 2 == 0);
  for (std::size_t i = 1; i < 5; ++i) CHECK(s[2 * i] > s[2 * i - 2]);
  CHECK(subsampleRows(m, 2, 5, 1) == s);
}

TEST_CASE("bag-of-words encoding") {
  std::mt19937_64 rng(30);
  const std::size_t dim = kSiftDim;
  Codebook cb;
  cb.k = 5;
  cb.dim = dim;
  cb.centroids = randomRows(rng, 5, dim);

  SUBCASE("identical descriptors give a one-hot histogram") {
    std::vector<float> rows;
    for (int i = 0; i < 7; ++i) rows.insert(rows.end(), cb.centroid(3), cb.centroid(3) + dim);
    const auto fv = encodeBow(rows, cb, SourceKind::ConvMap);
    CHECK(fv.values == std::vector<float>{0, 0, 0, 1, 0});
    CHECK((fv.kind == FeatureKind::Bow));
  }

  SUBCASE("matches the nearest-neighbour count oracle") {
    const auto rows = randomRows(rng, 20, dim);
    const auto fv = encodeBow(rows, cb, SourceKind::Grayscale);
    std::vector<float> counts(5, 0.0f);
    for (std::size_t i = 0; i < 20; ++i) counts[oracle::nearestByScan(rows.data() + i * dim, cb.centroids, dim)] += 1;
    for (std::size_t c = 0; c < 5; ++c) CHECK(fv.values[c] == float(double(counts[c]) / 20.0));
    double sum = 0;
    for (float v : fv.values) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((fv.sourceKind == SourceKind::Grayscale));

    std::vector<std::size_t> order(20);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<float> permuted;
    for (std::size_t i : order) permuted.insert(permuted.end(), rows.begin() + i * dim, rows.begin() + (i + 1) * dim);
    CHECK(encodeBow(permuted, cb, SourceKind::Grayscale).values == fv.values);
  }

  SUBCASE("ties go to the lowest index") {
    Codebook twin = cb;
    std::copy(cb.centroid(1), cb.centroid(1) + dim, twin.centroids.begin() + 4 * dim);
    std::vector<float> row(cb.centroid(1), cb.centroid(1) + dim);
    CHECK(nearestCentroid(twin, row.data()) == 1);
  }

  CHECK_THROWS_AS(encodeBow(std::vector<float>{}, cb, SourceKind::ConvMap), std::invalid_argument);
  CHECK_THROWS_AS(encodeBow(std::vector<SiftDescriptor>{}, cb, SourceKind::ConvMap), std::invalid_argument);
  Codebook small = cb;
  small.dim = 4;
  small.centroids.resize(20);
  CHECK_THROWS_AS(encodeBow(std::vector<SiftDescriptor>(2), small, SourceKind::ConvMap), std::invalid_argument);
}

TEST_CASE("codebook file round trip") {
  synth::TempDir dir("bow");
  std::mt19937_64 rng(1);
  Codebook cb;
  cb.k = 3;
  cb.dim = 4;
  cb.centroids = randomRows(rng, 3, 4);
  saveCodebook(dir / "c.cdcb", cb);
  const Codebook back = loadCodebook(dir / "c.cdcb");
  CHECK(back.k == 3);
  CHECK(back.dim == 4);
  CHECK(back.centroids == cb.centroids);
  CHECK_THROWS_AS(loadCodebook(dir / "missing.cdcb"), IoError);
  auto bytes = encodeCodebook(cb);
  bytes[14] ^= 1;
  CHECK_THROWS_AS(decodeCodebook(bytes, "x"), IntegrityError);
}
