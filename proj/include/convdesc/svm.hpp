#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace convdesc {

/// Row-major dense feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double* row(std::size_t i) { return values.data() + i * cols; }
  const double* row(std::size_t i) const { return values.data() + i * cols; }
  void appendRow(const std::vector<double>& r);
};

struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;  // population; zero-variance dims get 1

  std::vector<double> apply(const double* x, std::size_t n) const;
  FeatureMatrix apply(const FeatureMatrix& x) const;
};

Scaler fitScaler(const FeatureMatrix& x);

struct BinaryTrainOptions {
  double c = 1.0;
  std::size_t epochs = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
};

/// Per-epoch snapshot handed to an optional observer.
struct DualState {
  std::size_t epoch = 0;
  const std::vector<double>* alpha = nullptr;
  const std::vector<double>* weights = nullptr;  // bias is the last entry
  double maxViolation = 0.0;
};

struct BinarySolution {
  std::vector<double> weights;  // feature weights only
  double bias = 0.0;
  std::vector<double> alpha;
  std::size_t epochs = 0;
  double maxViolation = 0.0;
};

/// Soft-margin linear SVM via dual coordinate descent. The bias is an
/// augmented constant feature of value 1, so the solved primal is
/// 0.5 * (|w|^2 + b^2) + C * sum hinge(y_i (w.x_i + b)).
BinarySolution trainBinary(const FeatureMatrix& x, const std::vector<int>& y,
                           const BinaryTrainOptions& options,
                           const std::function<void(const DualState&)>& observer = {});

/// Objectives of the augmented problem, for checks and diagnostics.
double primalObjective(const FeatureMatrix& x, const std::vector<int>& y, double c,
                       const std::vector<double>& weights, double bias);
double dualObjective(const FeatureMatrix& x, const std::vector<int>& y,
                     const std::vector<double>& alpha);

struct SvmModel {
  std::vector<std::string> classLabels;  // sorted
  std::size_t dim = 0;
  std::vector<std::vector<double>> weights;  // per class
  std::vector<double> biases;
  double c = 1.0;
  Scaler scaler;

  /// Decision value per class on a raw (unscaled) feature vector.
  std::vector<double> decisionValues(const std::vector<double>& raw) const;
};

struct MulticlassTrainOptions {
  double c = 1.0;
  std::size_t epochs = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// One-vs-rest over the sorted label set with a shared standardization.
/// Every per-class problem uses the same seed.
SvmModel trainMulticlass(const FeatureMatrix& x, const std::vector<std::string>& labels,
                         const MulticlassTrainOptions& options);

/// Class with maximal decision value; ties go to the smallest label.
std::string predict(const SvmModel& model, const std::vector<double>& raw);

/// CDSV: "CDSV", class count u32, dim u32, labels (u32 length + UTF-8),
/// scaler mean f32[dim], scaler stddev f32[dim], per class weights f32[dim]
/// then bias f32, CRC32.
std::vector<std::uint8_t> encodeModel(const SvmModel& model);
SvmModel decodeModel(const std::vector<std::uint8_t>& bytes, const std::string& context);
void saveModel(const std::filesystem::path& path, const SvmModel& model);
SvmModel loadModel(const std::filesystem::path& path);

}  // namespace convdesc
