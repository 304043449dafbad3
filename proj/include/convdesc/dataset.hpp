#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convdesc/bow.hpp"
#include "convdesc/sift.hpp"
#include "convdesc/svm.hpp"
#include "convdesc/vgg.hpp"
#include "json.hpp"

namespace convdesc {

enum class Layout { MulticlassDirs, BinaryPosNeg };

const char* toString(Layout layout);
Layout parseLayout(const std::string& name);  // "multiclass" or "posneg"

struct DatasetEntry {
  std::string path;  // relative to the dataset root, '/' separated
  std::string label;
  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

struct DatasetManifest {
  std::string datasetName;
  Layout layout = Layout::MulticlassDirs;
  std::filesystem::path root;
  std::vector<DatasetEntry> entries;  // sorted by (label, path)
  std::string hash;                   // SHA-256 over layout and sorted entries

  std::vector<std::string> labels() const;  // sorted, unique
  std::filesystem::path absolutePath(const DatasetEntry& e) const { return root / e.path; }
};

/// Recognized image extensions (lowercase, with dot).
bool isImageFile(const std::filesystem::path& path);

/// Multiclass: one subdirectory per label. Posneg: subdirectories "pos" and
/// "neg". Hidden entries and non-image files are skipped.
DatasetManifest scanDataset(const std::filesystem::path& root, Layout layout);

std::string manifestHash(Layout layout, const std::vector<DatasetEntry>& entries);

struct SplitSpec {
  std::size_t trainPerClass = 0;
  /// Explicit per-label training counts; overrides trainPerClass when set.
  std::map<std::string, std::size_t> perClass;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<DatasetEntry> train;
  std::vector<DatasetEntry> test;
  std::string hash;
};

/// Seeded uniform per-class sample for training, remainder for testing.
Split split(const DatasetManifest& manifest, const SplitSpec& spec);

enum class DescriptorKind { SiftBow, Hlac };

const char* toString(DescriptorKind kind);
DescriptorKind parseDescriptorKind(const std::string& name);

struct PipelineConfig {
  DescriptorKind descriptor = DescriptorKind::Hlac;
  SourceKind source = SourceKind::Grayscale;
  std::filesystem::path weightsPath;
  std::filesystem::path codebookPath;  // pre-trained codebook; empty = train one
  PreprocessConfig preprocess;
  std::size_t grayscaleSide = BackboneSpec::kInputSide;
  DenseGridParams grid;
  std::size_t codebookK = 1000;
  std::size_t kmeansIters = 100;
  std::size_t codebookCap = 200000;
  std::uint64_t codebookSeed = 0;
  double svmC = 1.0;
  std::size_t svmEpochs = 1000;
  std::uint64_t svmSeed = 0;
  std::filesystem::path cacheDir;  // empty disables caching
  std::size_t workers = 1;
};

struct ExtractionStats {
  std::size_t images = 0;
  std::size_t computed = 0;
  std::size_t cacheHits = 0;
};

/// Per-image extraction with the on-disk cache. Caches are keyed by the
/// image's content hash and a hash of every setting that affects the output.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(PipelineConfig config);

  const PipelineConfig& config() const { return config_; }
  /// Hash of the settings that determine the map set.
  const std::string& mapConfigHash() const { return mapHash_; }
  /// Hash of the settings that determine per-image descriptors or features.
  const std::string& featureConfigHash() const { return featureHash_; }
  /// Every setting that determines per-image outputs, as recorded in reports.
  nlohmann::json settings() const;

  /// Conv maps (through the map cache) or the grayscale map.
  ConvMapSet maps(const std::vector<std::uint8_t>& imageBytes, const std::string& contentHash,
                  const std::filesystem::path& name, bool* cacheHit = nullptr) const;

  /// Descriptor matrix (sift-bow) for one image.
  std::vector<float> descriptors(const std::filesystem::path& image, bool* cacheHit = nullptr) const;
  /// HLAC feature vector for one image.
  FeatureVector hlacFeatures(const std::filesystem::path& image, bool* cacheHit = nullptr) const;

  using MapProgress = std::function<void(std::size_t index, const DatasetEntry&, bool cacheHit)>;

  /// Ensures every entry has a cached map set; returns hit/miss accounting.
  /// `progress` is called once per image, serialized.
  ExtractionStats extractMaps(const DatasetManifest& manifest, const MapProgress& progress = {}) const;

  std::filesystem::path mapCachePath(const std::string& contentHash) const;
  std::filesystem::path featureCachePath(const std::string& contentHash) const;

 private:
  PipelineConfig config_;
  std::optional<WeightStore> weights_;
  std::string mapHash_;
  std::string featureHash_;
};

/// CDFV: "CDFV", kind u8, dim u32, f32 values, CRC32.
std::vector<std::uint8_t> encodeFeatureVector(const FeatureVector& fv);
FeatureVector decodeFeatureVector(const std::vector<std::uint8_t>& bytes, const std::string& context);

struct EvalReport {
  std::string datasetName;
  std::string descriptor;
  std::string source;
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<double> perClassRecall;
  double accuracy = 0.0;
  double meanRecall = 0.0;
  std::size_t trainCount = 0;
  std::size_t testCount = 0;
  std::size_t featureDim = 0;
  std::string manifestHash;
  std::string splitHash;
  std::string codebookHash;  // sift-bow only
  nlohmann::json config;     // echo of every setting and seed
  ExtractionStats extraction;  // not serialized
};

/// Fills accuracy, recalls and counts from the confusion matrix.
void finalizeMetrics(EvalReport& report);

/// Full pipeline for one (descriptor, source) cell. The trained classifier is
/// copied to `modelOut` when given.
EvalReport runExperiment(const DatasetManifest& manifest, const SplitSpec& splitSpec,
                         const PipelineConfig& config, SvmModel* modelOut = nullptr);

std::string reportToJson(const EvalReport& report);
EvalReport reportFromJson(const std::string& text);
/// Two-column "Approach | %" table.
std::string reportTable(const EvalReport& report);
std::string confusionCsv(const EvalReport& report);
/// "HLAC, ConvMaps", "SIFT+BoW, Grayscale", ...
std::string approachName(const EvalReport& report);

struct Comparison {
  std::string approachA;
  std::string approachB;
  double percentA = 0.0;
  double percentB = 0.0;
  double deltaPoints = 0.0;  // B - A
};

/// Both reports must come from the same split.
Comparison compareReport(const EvalReport& a, const EvalReport& b);
std::string formatComparison(const Comparison& c);

}  // namespace convdesc
