#include "convdesc/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "convdesc/binary_io.hpp"
#include "convdesc/errors.hpp"
#include "convdesc/parallel.hpp"
#include "convdesc/random.hpp"

namespace convdesc {

void FeatureMatrix::appendRow(const std::vector<double>& r) {
  if (rows == 0 && cols == 0) cols = r.size();
  if (r.size() != cols) throw std::invalid_argument("appendRow: row width mismatch");
  values.insert(values.end(), r.begin(), r.end());
  ++rows;
}

std::vector<double> Scaler::apply(const double* x, std::size_t n) const {
  if (n != mean.size()) {
    throw std::invalid_argument("scaler: feature dim " + std::to_string(n) + " != " +
                                std::to_string(mean.size()));
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = (x[j] - mean[j]) / stddev[j];
  return out;
}

FeatureMatrix Scaler::apply(const FeatureMatrix& x) const {
  FeatureMatrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto r = apply(x.row(i), x.cols);
    std::copy(r.begin(), r.end(), out.row(i));
  }
  return out;
}

Scaler fitScaler(const FeatureMatrix& x) {
  if (x.rows == 0 || x.cols == 0) throw std::invalid_argument("fitScaler: empty matrix");
  Scaler s;
  s.mean.assign(x.cols, 0.0);
  s.stddev.assign(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] += x.row(i)[j];
  for (double& m : s.mean) m /= static_cast<double>(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = x.row(i)[j] - s.mean[j];
      s.stddev[j] += d * d;
    }
  for (double& v : s.stddev) {
    v = std::sqrt(v / static_cast<double>(x.rows));
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

namespace {

void checkBinaryInputs(const FeatureMatrix& x, const std::vector<int>& y) {
  if (x.rows == 0) throw std::invalid_argument("trainBinary: no training rows");
  if (y.size() != x.rows) throw std::invalid_argument("trainBinary: label count != row count");
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw std::invalid_argument("trainBinary: labels must be +1 or -1");
  }
  if (!pos || !neg) throw std::invalid_argument("trainBinary: both classes need at least one example");
}

double dotAugmented(const std::vector<double>& w, const double* x, std::size_t d) {
  double s = w[d];
  for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
  return s;
}

}  // namespace

BinarySolution trainBinary(const FeatureMatrix& x, const std::vector<int>& y,
                           const BinaryTrainOptions& options,
                           const std::function<void(const DualState&)>& observer) {
  checkBinaryInputs(x, y);
  if (!(options.c > 0.0) || !std::isfinite(options.c)) {
    throw std::invalid_argument("trainBinary: C must be positive");
  }
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const double c = options.c;

  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.row(i);
    qd[i] = std::inner_product(xi, xi + d, xi, 1.0);
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(d + 1, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);

  BinarySolution sol;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    shuffleInPlace(order, rng);
    double maxViolation = 0.0;
    for (std::size_t i : order) {
      const double* xi = x.row(i);
      const double yi = y[i];
      const double g = yi * dotAugmented(w, xi, d) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] >= c) pg = std::max(g, 0.0);
      maxViolation = std::max(maxViolation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qd[i], 0.0, c);
      const double delta = (alpha[i] - old) * yi;
      if (delta == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) w[j] += delta * xi[j];
      w[d] += delta;
    }
    sol.epochs = epoch;
    sol.maxViolation = maxViolation;
    if (observer) observer(DualState{epoch, &alpha, &w, maxViolation});
    if (maxViolation < options.tolerance) break;
  }

  sol.bias = w[d];
  w.resize(d);
  sol.weights = std::move(w);
  sol.alpha = std::move(alpha);
  return sol;
}

double primalObjective(const FeatureMatrix& x, const std::vector<int>& y, double c,
                       const std::vector<double>& weights, double bias) {
  double reg = bias * bias;
  for (double v : weights) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double f = bias;
    for (std::size_t j = 0; j < x.cols; ++j) f += weights[j] * x.row(i)[j];
    loss += std::max(0.0, 1.0 - y[i] * f);
  }
  return 0.5 * reg + c * loss;
}

double dualObjective(const FeatureMatrix& x, const std::vector<int>& y,
                     const std::vector<double>& alpha) {
  std::vector<double> w(x.cols + 1, 0.0);
  double sumAlpha = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    sumAlpha += alpha[i];
    for (std::size_t j = 0; j < x.cols; ++j) w[j] += alpha[i] * y[i] * x.row(i)[j];
    w[x.cols] += alpha[i] * y[i];
  }
  const double norm2 = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return sumAlpha - 0.5 * norm2;
}

std::vector<double> SvmModel::decisionValues(const std::vector<double>& raw) const {
  if (raw.size() != dim) {
    throw std::invalid_argument("predict: feature dim " + std::to_string(raw.size()) +
                                " != model dim " + std::to_string(dim));
  }
  const auto z = scaler.apply(raw.data(), raw.size());
  std::vector<double> out(classLabels.size());
  for (std::size_t k = 0; k < classLabels.size(); ++k) {
    out[k] = std::inner_product(z.begin(), z.end(), weights[k].begin(), biases[k]);
  }
  return out;
}

SvmModel trainMulticlass(const FeatureMatrix& x, const std::vector<std::string>& labels,
                         const MulticlassTrainOptions& options) {
  if (labels.size() != x.rows) throw std::invalid_argument("trainMulticlass: label count != row count");
  const std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw std::invalid_argument("trainMulticlass: need at least 2 classes, got " +
                                std::to_string(distinct.size()));
  }
  SvmModel model;
  model.classLabels.assign(distinct.begin(), distinct.end());
  model.dim = x.cols;
  model.c = options.c;
  model.scaler = fitScaler(x);
  const FeatureMatrix z = model.scaler.apply(x);

  const std::size_t k = model.classLabels.size();
  model.weights.resize(k);
  model.biases.resize(k);
  parallelFor(k, options.workers, [&](std::size_t cls) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      y[i] = labels[i] == model.classLabels[cls] ? 1 : -1;
    }
    BinaryTrainOptions bo;
    bo.c = options.c;
    bo.epochs = options.epochs;
    bo.seed = options.seed;
    auto sol = trainBinary(z, y, bo);
    model.weights[cls] = std::move(sol.weights);
    model.biases[cls] = sol.bias;
  });
  return model;
}

std::string predict(const SvmModel& model, const std::vector<double>& raw) {
  const auto dv = model.decisionValues(raw);
  std::size_t best = 0;
  for (std::size_t k = 1; k < dv.size(); ++k) {
    if (dv[k] > dv[best]) best = k;
  }
  return model.classLabels[best];
}

std::vector<std::uint8_t> encodeModel(const SvmModel& model) {
  ByteWriter w;
  w.magic("CDSV");
  w.u32(static_cast<std::uint32_t>(model.classLabels.size()));
  w.u32(static_cast<std::uint32_t>(model.dim));
  for (const auto& l : model.classLabels) w.string(l);
  auto put = [&](const std::vector<double>& v) {
    for (double d : v) w.f32(static_cast<float>(d));
  };
  put(model.scaler.mean);
  put(model.scaler.stddev);
  for (std::size_t k = 0; k < model.classLabels.size(); ++k) {
    put(model.weights[k]);
    w.f32(static_cast<float>(model.biases[k]));
  }
  return w.finishWithCrc();
}

SvmModel decodeModel(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r(bytes, context);
  r.expectMagic("CDSV");
  SvmModel m;
  const std::size_t classes = r.u32();
  m.dim = r.u32();
  for (std::size_t k = 0; k < classes; ++k) m.classLabels.push_back(r.string());
  auto get = [&](std::size_t n) {
    const auto f = r.f32s(n);
    return std::vector<double>(f.begin(), f.end());
  };
  m.scaler.mean = get(m.dim);
  m.scaler.stddev = get(m.dim);
  for (std::size_t k = 0; k < classes; ++k) {
    m.weights.push_back(get(m.dim));
    m.biases.push_back(r.f32());
  }
  r.expectEnd();
  return m;
}

void saveModel(const std::filesystem::path& path, const SvmModel& model) {
  writeFileAtomic(path, encodeModel(model));
}

SvmModel loadModel(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("model file not found: " + path.string());
  return decodeModel(readFileBytes(path), path.string());
}

}  // namespace convdesc
