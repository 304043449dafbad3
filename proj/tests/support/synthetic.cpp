#include "support/synthetic.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <sys/wait.h>

namespace synth {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("convdesc-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

convdesc::Tensor randomTensor(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c,
                              double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  convdesc::Tensor t(h, w, c);
  for (auto& v : t.data()) v = static_cast<float>(u(rng));
  return t;
}

convdesc::FilterBank randomBank(std::mt19937_64& rng, std::size_t kernels, std::size_t kh,
                                std::size_t kw, std::size_t cin, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  convdesc::FilterBank b;
  b.kernelCount = kernels;
  b.kernelHeight = kh;
  b.kernelWidth = kw;
  b.inChannels = cin;
  b.weights.resize(kernels * kh * kw * cin);
  for (auto& v : b.weights) v = static_cast<float>(u(rng));
  b.biases.resize(kernels);
  for (auto& v : b.biases) v = static_cast<float>(u(rng) * 0.1);
  return b;
}

convdesc::WeightStore randomWeights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  convdesc::WeightStore s;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& l = convdesc::BackboneSpec::kLayers[i];
    const double scale = std::sqrt(6.0 / (9.0 * static_cast<double>(l.inChannels)));
    s.banks[i] = randomBank(rng, l.kernelCount, 3, 3, l.inChannels, scale);
  }
  return s;
}

convdesc::Raster stripeImage(Stripes orientation, std::mt19937_64& rng, std::size_t side) {
  std::uniform_real_distribution<double> period(6.0, 14.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 18.0);
  const double p = period(rng);
  const double ph = phase(rng);
  convdesc::Raster r;
  r.width = side;
  r.height = side;
  r.rgb.resize(side * side * 3);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) {
      const double coord = orientation == Stripes::Vertical ? double(x) : double(y);
      const double v = 128.0 + 90.0 * std::sin(2.0 * std::numbers::pi * coord / p + ph) + noise(rng);
      const auto px = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      for (std::size_t c = 0; c < 3; ++c) r.rgb[(y * side + x) * 3 + c] = px;
    }
  return r;
}

void writeStripeDataset(const fs::path& root, std::size_t perClass, std::uint64_t seed, std::size_t side) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < perClass; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%03zu.png", i);
    convdesc::writeImage(root / "vertical" / name, stripeImage(Stripes::Vertical, rng, side));
    convdesc::writeImage(root / "horizontal" / name, stripeImage(Stripes::Horizontal, rng, side));
  }
}

convdesc::Raster solidImage(std::size_t w, std::size_t h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  convdesc::Raster img;
  img.width = w;
  img.height = h;
  img.rgb.resize(w * h * 3);
  for (std::size_t i = 0; i < w * h; ++i) {
    img.rgb[i * 3] = r;
    img.rgb[i * 3 + 1] = g;
    img.rgb[i * 3 + 2] = b;
  }
  return img;
}

std::string readText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

CommandResult runCommand(const std::string& program, const std::vector<std::string>& args,
                         const fs::path& cacheDir) {
  std::string cmd = cacheDir.empty() ? "env -u CONVDESC_CACHE_DIR " : "CONVDESC_CACHE_DIR=" + quote(cacheDir.string()) + " ";
  cmd += quote(program);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  CommandResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace synth
