#include <cmath>
#include <numbers>
#include <random>

#include "convdesc/sift.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace convdesc;

namespace {

ConvMapSet mapSet(Tensor t) {
  ConvMapSet s;
  s.maps = std::move(t);
  s.sourceKind = SourceKind::Grayscale;
  return s;
}

Tensor integerMap(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c) {
  std::uniform_int_distribution<int> d(-50, 50);
  Tensor t(h, w, c);
  for (auto& v : t.data()) v = static_cast<Real>(d(rng));
  return t;
}

double norm(const std::array<float, kSiftDim>& v) {
  double s = 0;
  for (float f : v) s += double(f) * f;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("gradient field") {
  SUBCASE("constant map") {
    const auto g = gradientField(Tensor(5, 6, 1, 3.5f));
    for (Real m : g.magnitude.data()) CHECK(m == 0.0f);
  }
  SUBCASE("horizontal ramp") {
    Tensor t(6, 8, 1);
    for (std::size_t y = 0; y < 6; ++y)
      for (std::size_t x = 0; x < 8; ++x) t.at(y, x, 0) = static_cast<Real>(x);
    const auto g = gradientField(t);
    for (std::size_t y = 1; y < 5; ++y)
      for (std::size_t x = 1; x < 7; ++x) {
        CHECK(g.magnitude.at(y, x, 0) == 1.0f);
        CHECK(g.orientation.at(y, x, 0) == 0.0f);
      }
  }
  SUBCASE("random maps match finite differences") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const Tensor t = synth::randomTensor(rng, 7, 7, 1);
      const auto g = gradientField(t);
      for (std::size_t y = 0; y < 7; ++y)
        for (std::size_t x = 0; x < 7; ++x) {
          const auto [gx, gy] = oracle::finiteDifference(t, y, x);
          CHECK(g.magnitude.at(y, x, 0) == doctest::Approx(std::hypot(gx, gy)).epsilon(1e-6));
          if (std::hypot(gx, gy) > 1e-3) {
            double theta = std::atan2(gy, gx);
            if (theta < 0) theta += 2 * std::numbers::pi;
            double diff = std::abs(g.orientation.at(y, x, 0) - theta);
            diff = std::min(diff, 2 * std::numbers::pi - diff);
            CHECK(diff < 1e-5);
          }
          CHECK(g.orientation.at(y, x, 0) >= 0.0f);
          CHECK(g.orientation.at(y, x, 0) < float(2 * std::numbers::pi));
        }
    }
  }
  CHECK_THROWS_AS(gradientField(Tensor(2, 5, 1)), std::invalid_argument);
}

TEST_CASE("grid parameters and counts") {
  CHECK_THROWS_AS((DenseGridParams{6, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DenseGridParams{0, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DenseGridParams{8, 0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((DenseGridParams{4, 1}.validate()));

  std::mt19937_64 rng(5);
  const auto d = denseSift(mapSet(synth::randomTensor(rng, 56, 56, 2)), DenseGridParams{16, 8});
  CHECK(d.size() == 72);
  CHECK(d[0].channelIndex == 0);
  CHECK(d[35].channelIndex == 0);
  CHECK(d[36].channelIndex == 1);
  CHECK(d[1].x == 16);
  CHECK(d[6].y == 16);

  CHECK_THROWS_AS(denseSift(mapSet(Tensor(12, 20, 1)), DenseGridParams{16, 8}), std::invalid_argument);
}

TEST_CASE("descriptor count matches the closed form") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> side(4, 30), patch(1, 7), step(1, 9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t p = 4 * patch(rng);
    const std::size_t h = p + side(rng) - 4;
    const std::size_t w = p + side(rng) - 4;
    const std::size_t s = step(rng);
    const auto d = denseSift(mapSet(synth::randomTensor(rng, h, w, 1)), DenseGridParams{p, s});
    const auto expected = static_cast<std::size_t>(std::floor(double(h - p) / double(s) + 1) *
                                                   std::floor(double(w - p) / double(s) + 1));
    CHECK(d.size() == expected);
  }
}

TEST_CASE("ramp patch puts all mass in orientation bin 0") {
  Tensor t(16, 16, 1);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 16; ++x) t.at(y, x, 0) = static_cast<Real>(x);
  const auto hist = siftPatchHistogram(gradientField(t), 0, 0, 16);
  double total = 0;
  for (std::size_t cell = 0; cell < 16; ++cell) {
    CHECK(hist[cell * 8] > 0.0);
    for (std::size_t b = 1; b < 8; ++b) CHECK(hist[cell * 8 + b] == 0.0);
    total += hist[cell * 8];
  }
  // Every pixel has magnitude 1 and its spatial weights sum to 1 or less.
  CHECK(total <= 256.0 + 1e-9);
}

TEST_CASE("normalization") {
  const auto zero = denseSift(mapSet(Tensor(20, 20, 3, 7.0f)), DenseGridParams{8, 4});
  for (const auto& d : zero)
    for (float v : d.values) CHECK(v == 0.0f);

  std::mt19937_64 rng(9);
  for (const auto& d : denseSift(mapSet(synth::randomTensor(rng, 24, 24, 2)), DenseGridParams{8, 4})) {
    CHECK(norm(d.values) == doctest::Approx(1.0).epsilon(1e-5));
    for (float v : d.values) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }

  // One dominant component: after clamping it is 0.2 of the first norm, then
  // rescaled.
  std::array<double, kSiftDim> h{};
  h[0] = 10.0;
  h[1] = 1.0;
  const auto n = normalizeSift(h);
  const double a = 0.2;
  const double b = 1.0 / std::sqrt(101.0);
  CHECK(n[0] == doctest::Approx(a / std::hypot(a, b)).epsilon(1e-6));
  CHECK(n[1] == doctest::Approx(b / std::hypot(a, b)).epsilon(1e-6));
}

TEST_CASE("photometric invariance") {
  std::mt19937_64 rng(13);
  const Tensor base = integerMap(rng, 32, 32, 2);
  const auto ref = denseSift(mapSet(base), DenseGridParams{16, 8});

  Tensor shifted = base;
  for (auto& v : shifted.data()) v += 1000.0f;
  const auto s = denseSift(mapSet(shifted), DenseGridParams{16, 8});
  REQUIRE(s.size() == ref.size());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].values == ref[i].values);

  for (float c : {0.37f, 3.0f, 250.0f}) {
    Tensor scaled = base;
    for (auto& v : scaled.data()) v *= c;
    const auto d = denseSift(mapSet(scaled), DenseGridParams{16, 8});
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < kSiftDim; ++j)
        CHECK(std::abs(d[i].values[j] - ref[i].values[j]) <= 1e-5f);
  }
}

TEST_CASE("descriptor dump round trip") {
  std::mt19937_64 rng(2);
  const auto m = descriptorMatrix(denseSift(mapSet(synth::randomTensor(rng, 16, 16, 2)), DenseGridParams{8, 8}));
  CHECK(m.size() == 8 * kSiftDim);
  const auto bytes = encodeDescriptorDump(m);
  CHECK(bytes.size() == 12 + m.size() * 4 + 4);
  CHECK(decodeDescriptorDump(bytes, "d") == m);
  CHECK_THROWS_AS(encodeDescriptorDump(std::vector<float>(130)), std::invalid_argument);
}
