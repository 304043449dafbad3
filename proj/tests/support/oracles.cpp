#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace oracle {

namespace {

std::vector<double> conv(const Tensor& in, const FilterBank& b, long padY, long padX,
                         std::size_t oh, std::size_t ow) {
  std::vector<double> out(oh * ow * b.kernelCount);
  for (std::size_t k = 0; k < b.kernelCount; ++k)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        double s = b.biases[k];
        for (std::size_t ky = 0; ky < b.kernelHeight; ++ky)
          for (std::size_t kx = 0; kx < b.kernelWidth; ++kx)
            for (std::size_t c = 0; c < b.inChannels; ++c) {
              const long iy = static_cast<long>(y + ky) - padY;
              const long ix = static_cast<long>(x + kx) - padX;
              if (iy < 0 || ix < 0 || iy >= static_cast<long>(in.height()) ||
                  ix >= static_cast<long>(in.width()))
                continue;
              s += static_cast<double>(b.weights[((k * b.kernelHeight + ky) * b.kernelWidth + kx) *
                                                     b.inChannels + c]) *
                   in.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), c);
            }
        out[(y * ow + x) * b.kernelCount + k] = s;
      }
  return out;
}

}  // namespace

std::vector<double> conv2dSame(const Tensor& input, const FilterBank& bank) {
  return conv(input, bank, static_cast<long>(bank.kernelHeight / 2), static_cast<long>(bank.kernelWidth / 2),
              input.height(), input.width());
}

std::vector<double> conv2dValid(const Tensor& input, const FilterBank& bank) {
  return conv(input, bank, 0, 0, input.height() - bank.kernelHeight + 1,
              input.width() - bank.kernelWidth + 1);
}

std::vector<float> relu(const Tensor& input) {
  std::vector<float> out;
  for (float v : input.data()) out.push_back(v < 0.0f ? 0.0f : v);
  return out;
}

std::vector<float> maxpool2(const Tensor& input) {
  const std::size_t oh = input.height() / 2, ow = input.width() / 2, ch = input.channels();
  std::vector<float> out(oh * ow * ch);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x)
      for (std::size_t c = 0; c < ch; ++c) {
        float m = -std::numeric_limits<float>::infinity();
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) m = std::max(m, input.at(2 * y + dy, 2 * x + dx, c));
        out[(y * ow + x) * ch + c] = m;
      }
  return out;
}

double bilinearSample(const Tensor& input, std::size_t c, std::size_t outH, std::size_t outW,
                      std::size_t oy, std::size_t ox) {
  const double H = static_cast<double>(input.height());
  const double W = static_cast<double>(input.width());
  double sy = (oy + 0.5) * H / outH - 0.5;
  double sx = (ox + 0.5) * W / outW - 0.5;
  sy = std::min(std::max(sy, 0.0), H - 1);
  sx = std::min(std::max(sx, 0.0), W - 1);
  const double y0 = std::floor(sy), x0 = std::floor(sx);
  const double y1 = std::min(y0 + 1, H - 1), x1 = std::min(x0 + 1, W - 1);
  const double ty = sy - y0, tx = sx - x0;
  auto v = [&](double yy, double xx) {
    return static_cast<double>(input.at(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx), c));
  };
  return v(y0, x0) * (1 - ty) * (1 - tx) + v(y0, x1) * (1 - ty) * tx + v(y1, x0) * ty * (1 - tx) +
         v(y1, x1) * ty * tx;
}

std::pair<double, double> finiteDifference(const Tensor& m, std::size_t y, std::size_t x) {
  const std::size_t h = m.height(), w = m.width();
  auto v = [&](std::size_t yy, std::size_t xx) { return static_cast<double>(m.at(yy, xx, 0)); };
  double gx, gy;
  if (x == 0) gx = v(y, 1) - v(y, 0);
  else if (x == w - 1) gx = v(y, x) - v(y, x - 1);
  else gx = (v(y, x + 1) - v(y, x - 1)) / 2.0;
  if (y == 0) gy = v(1, x) - v(0, x);
  else if (y == h - 1) gy = v(y, x) - v(y - 1, x);
  else gy = (v(y + 1, x) - v(y - 1, x)) / 2.0;
  return {gx, gy};
}

std::size_t nearestByScan(const float* row, const std::vector<float>& centroids, std::size_t dim) {
  std::size_t best = 0;
  double bestD = std::numeric_limits<double>::max();
  for (std::size_t c = 0; c * dim < centroids.size(); ++c) {
    double d = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = double(row[j]) - double(centroids[c * dim + j]);
      d += diff * diff;
    }
    if (d < bestD) {
      bestD = d;
      best = c;
    }
  }
  return best;
}

double kmeansDistortion(const std::vector<float>& data, const std::vector<float>& centroids,
                        std::size_t dim) {
  double total = 0;
  for (std::size_t i = 0; i * dim < data.size(); ++i) {
    const std::size_t c = nearestByScan(&data[i * dim], centroids, dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = double(data[i * dim + j]) - double(centroids[c * dim + j]);
      total += diff * diff;
    }
  }
  return total;
}

OtsuScan otsuExhaustive(const Tensor& map) {
  OtsuScan scan;
  scan.variance.assign(256, 0.0);
  const auto d = map.data();
  double lo = d[0], hi = d[0];
  for (float v : d) {
    lo = std::min(lo, double(v));
    hi = std::max(hi, double(v));
  }
  std::vector<int> bin(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    int b = static_cast<int>(std::floor((double(d[i]) - lo) / (hi - lo) * 256.0));
    bin[i] = std::min(255, std::max(0, b));
  }
  const double n = static_cast<double>(d.size());
  for (int t = 1; t < 256; ++t) {
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (int b : bin) {
      if (b < t) {
        n0 += 1;
        s0 += b;
      } else {
        n1 += 1;
        s1 += b;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    const double m0 = s0 / n0, m1 = s1 / n1;
    scan.variance[t] = (n0 / n) * (n1 / n) * (m0 - m1) * (m0 - m1);
    scan.best = std::max(scan.best, scan.variance[t]);
  }
  return scan;
}

std::vector<Offsets> hlacMasksBruteForce() {
  std::vector<std::pair<int, int>> cells;
  for (int r = -1; r <= 1; ++r)
    for (int c = -1; c <= 1; ++c) cells.push_back({r, c});

  auto translateEqual = [](Offsets a, Offsets b) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const int dy = b[0].first - a[0].first, dx = b[0].second - a[0].second;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].first + dy != b[i].first || a[i].second + dx != b[i].second) return false;
    return true;
  };
  // Translates of the set that put one of its points on the center and keep
  // the rest inside the window.
  auto centeredForms = [](const Offsets& s) {
    std::vector<Offsets> forms;
    for (const auto& p : s) {
      Offsets f;
      bool ok = true;
      for (const auto& q : s) {
        const int a = q.first - p.first, b = q.second - p.second;
        if (a < -1 || a > 1 || b < -1 || b > 1) ok = false;
        f.push_back({a, b});
      }
      if (ok) {
        std::sort(f.begin(), f.end());
        forms.push_back(f);
      }
    }
    return forms;
  };

  std::vector<std::vector<Offsets>> classes;
  for (unsigned mask = 1; mask < (1u << 9); ++mask) {
    if (__builtin_popcount(mask) > 3) continue;
    Offsets s;
    for (int i = 0; i < 9; ++i)
      if (mask & (1u << i)) s.push_back(cells[i]);
    if (centeredForms(s).empty()) continue;
    bool placed = false;
    for (auto& cls : classes) {
      if (translateEqual(cls[0], s)) {
        cls.push_back(s);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({s});
  }

  std::vector<Offsets> reps;
  for (const auto& cls : classes) {
    Offsets best;
    bool have = false;
    for (const auto& member : cls)
      for (const auto& f : centeredForms(member))
        if (!have || f < best) {
          best = f;
          have = true;
        }
    reps.push_back(best);
  }
  std::sort(reps.begin(), reps.end(), [](const Offsets& a, const Offsets& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return reps;
}

std::vector<std::uint64_t> hlacDirect(const std::vector<std::uint8_t>& bits, std::size_t h,
                                      std::size_t w, const std::vector<Offsets>& masks) {
  std::vector<std::uint64_t> out(masks.size(), 0);
  for (std::size_t m = 0; m < masks.size(); ++m)
    for (std::size_t y = 1; y + 1 < h; ++y)
      for (std::size_t x = 1; x + 1 < w; ++x) {
        std::uint64_t prod = 1;
        for (const auto& [dy, dx] : masks[m]) prod *= bits[(y + dy) * w + (x + dx)];
        out[m] += prod;
      }
  return out;
}

double svmDualMaximum(const std::vector<std::vector<double>>& x, const std::vector<int>& y, double c) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 1.0;  // augmented bias feature
      for (std::size_t d = 0; d < x[i].size(); ++d) dot += x[i][d] * x[j][d];
      q[i][j] = y[i] * y[j] * dot;
    }
  auto objective = [&](const std::vector<double>& a) {
    double lin = 0, quad = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lin += a[i];
      for (std::size_t j = 0; j < n; ++j) quad += a[i] * q[i][j] * a[j];
    }
    return lin - 0.5 * quad;
  };

  double best = -std::numeric_limits<double>::infinity();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  for (std::size_t code = 0; code < combos; ++code) {
    std::vector<int> state(n);  // 0: at 0, 1: at C, 2: free
    std::size_t rest = code;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % 3);
      rest /= 3;
    }
    std::vector<double> a(n, 0.0);
    std::vector<std::size_t> freeIdx;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) a[i] = c;
      if (state[i] == 2) freeIdx.push_back(i);
    }
    const std::size_t f = freeIdx.size();
    if (f > 0) {
      // Stationarity on the free block: Q_FF a_F = 1 - Q_FB a_B.
      std::vector<std::vector<double>> m(f, std::vector<double>(f + 1));
      for (std::size_t r = 0; r < f; ++r) {
        double rhs = 1.0;
        for (std::size_t j = 0; j < n; ++j)
          if (state[j] == 1) rhs -= q[freeIdx[r]][j] * c;
        for (std::size_t s = 0; s < f; ++s) m[r][s] = q[freeIdx[r]][freeIdx[s]];
        m[r][f] = rhs;
      }
      bool singular = false;
      for (std::size_t col = 0; col < f && !singular; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < f; ++r)
          if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-10) {
          singular = true;
          break;
        }
        std::swap(m[piv], m[col]);
        for (std::size_t r = 0; r < f; ++r) {
          if (r == col) continue;
          const double factor = m[r][col] / m[col][col];
          for (std::size_t s = col; s <= f; ++s) m[r][s] -= factor * m[col][s];
        }
      }
      if (singular) continue;
      bool inside = true;
      for (std::size_t r = 0; r < f; ++r) {
        const double v = m[r][f] / m[r][r];
        if (v < -1e-12 || v > c + 1e-12) inside = false;
        a[freeIdx[r]] = std::min(std::max(v, 0.0), c);
      }
      if (!inside) continue;
    }
    best = std::max(best, objective(a));
  }
  return best;
}

}  // namespace oracle
