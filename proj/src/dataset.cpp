#include "convdesc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "convdesc/binary_io.hpp"
#include "convdesc/errors.hpp"
#include "convdesc/hlac.hpp"
#include "convdesc/image.hpp"
#include "convdesc/parallel.hpp"
#include "convdesc/random.hpp"
#include "convdesc/svm.hpp"

namespace fs = std::filesystem;

namespace convdesc {

const char* toString(Layout layout) {
  return layout == Layout::MulticlassDirs ? "multiclass" : "posneg";
}

Layout parseLayout(const std::string& name) {
  if (name == "multiclass") return Layout::MulticlassDirs;
  if (name == "posneg") return Layout::BinaryPosNeg;
  throw std::invalid_argument("unknown layout '" + name + "' (valid: multiclass, posneg)");
}

const char* toString(DescriptorKind kind) {
  return kind == DescriptorKind::SiftBow ? "sift-bow" : "hlac";
}

DescriptorKind parseDescriptorKind(const std::string& name) {
  if (name == "sift-bow") return DescriptorKind::SiftBow;
  if (name == "hlac") return DescriptorKind::Hlac;
  throw std::invalid_argument("unknown descriptor '" + name + "' (valid: sift-bow, hlac)");
}

std::vector<std::string> DatasetManifest::labels() const {
  std::set<std::string> s;
  for (const auto& e : entries) s.insert(e.label);
  return {s.begin(), s.end()};
}

bool isImageFile(const fs::path& path) {
  static const std::set<std::string> kExt{".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".pgm",
                                          ".pbm", ".pnm", ".tif", ".tiff", ".webp"};
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return kExt.count(ext) > 0;
}

namespace {

bool hidden(const fs::path& p) {
  const auto name = p.filename().string();
  return !name.empty() && name[0] == '.';
}

std::vector<DatasetEntry> scanClassDir(const fs::path& root, const fs::path& dir,
                                       const std::string& label) {
  std::vector<DatasetEntry> out;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (hidden(f.path()) || !f.is_regular_file() || !isImageFile(f.path())) continue;
    std::ifstream probe(f.path(), std::ios::binary);
    if (!probe) throw IoError("unreadable file " + f.path().string());
    out.push_back({fs::relative(f.path(), root).generic_string(), label});
  }
  if (out.empty()) throw FormatError("class directory '" + label + "' contains no images (" + dir.string() + ")");
  return out;
}

}  // namespace

std::string manifestHash(Layout layout, const std::vector<DatasetEntry>& entries) {
  std::string text = std::string(toString(layout)) + "\n";
  for (const auto& e : entries) text += e.label + "\t" + e.path + "\n";
  return sha256Hex(text);
}

DatasetManifest scanDataset(const fs::path& root, Layout layout) {
  if (!fs::is_directory(root)) throw IoError("dataset root is not a directory: " + root.string());
  DatasetManifest m;
  m.root = root;
  m.layout = layout;
  m.datasetName = fs::absolute(root).lexically_normal().filename().string();
  if (m.datasetName.empty()) m.datasetName = fs::absolute(root).parent_path().filename().string();

  if (layout == Layout::MulticlassDirs) {
    std::vector<fs::path> dirs;
    for (const auto& d : fs::directory_iterator(root)) {
      if (d.is_directory() && !hidden(d.path())) dirs.push_back(d.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      auto entries = scanClassDir(root, d, d.filename().string());
      m.entries.insert(m.entries.end(), entries.begin(), entries.end());
    }
  } else {
    for (const char* label : {"neg", "pos"}) {
      const fs::path d = root / label;
      if (!fs::is_directory(d)) throw FormatError("posneg layout needs a '" + std::string(label) + "' directory under " + root.string());
      auto entries = scanClassDir(root, d, label);
      m.entries.insert(m.entries.end(), entries.begin(), entries.end());
    }
  }
  std::sort(m.entries.begin(), m.entries.end(), [](const DatasetEntry& a, const DatasetEntry& b) {
    return std::tie(a.label, a.path) < std::tie(b.label, b.path);
  });
  if (m.labels().size() < 2) throw FormatError("dataset " + root.string() + " needs at least 2 labels");
  m.hash = manifestHash(layout, m.entries);
  return m;
}

Split split(const DatasetManifest& manifest, const SplitSpec& spec) {
  std::map<std::string, std::vector<DatasetEntry>> byClass;
  for (const auto& e : manifest.entries) byClass[e.label].push_back(e);

  Split s;
  std::string text = manifest.hash + "\n";
  Rng rng(spec.seed);
  for (auto& [label, items] : byClass) {
    std::size_t want = spec.trainPerClass;
    if (!spec.perClass.empty()) {
      auto it = spec.perClass.find(label);
      if (it == spec.perClass.end()) throw std::invalid_argument("no training count given for class '" + label + "'");
      want = it->second;
    }
    if (want == 0) throw std::invalid_argument("training count for class '" + label + "' must be positive");
    if (want >= items.size()) {
      throw std::invalid_argument("class '" + label + "' has " + std::to_string(items.size()) +
                                  " images; cannot take " + std::to_string(want) +
                                  " for training and leave a test image");
    }
    shuffleInPlace(items, rng);
    std::vector<DatasetEntry> train(items.begin(), items.begin() + static_cast<long>(want));
    std::vector<DatasetEntry> test(items.begin() + static_cast<long>(want), items.end());
    auto byPath = [](const DatasetEntry& a, const DatasetEntry& b) { return a.path < b.path; };
    std::sort(train.begin(), train.end(), byPath);
    std::sort(test.begin(), test.end(), byPath);
    for (const auto& e : train) text += "train\t" + e.path + "\n";
    for (const auto& e : test) text += "test\t" + e.path + "\n";
    s.train.insert(s.train.end(), train.begin(), train.end());
    s.test.insert(s.test.end(), test.begin(), test.end());
  }
  for (const auto& [label, n] : spec.perClass) {
    if (!byClass.count(label)) throw std::invalid_argument("training count given for unknown class '" + label + "'");
  }
  s.hash = sha256Hex(text);
  return s;
}

// ---------------------------------------------------------------------------
// Feature extraction and caching

std::vector<std::uint8_t> encodeFeatureVector(const FeatureVector& fv) {
  ByteWriter w;
  w.magic("CDFV");
  w.u8(static_cast<std::uint8_t>(fv.kind));
  w.u32(static_cast<std::uint32_t>(fv.values.size()));
  w.f32s(fv.values);
  return w.finishWithCrc();
}

FeatureVector decodeFeatureVector(const std::vector<std::uint8_t>& bytes, const std::string& context) {
  ByteReader r(bytes, context);
  r.expectMagic("CDFV");
  FeatureVector fv;
  const std::uint8_t kind = r.u8();
  if (kind > 1) throw FormatError(context + ": unknown feature kind " + std::to_string(kind));
  fv.kind = static_cast<FeatureKind>(kind);
  const std::size_t dim = r.u32();
  fv.values = r.f32s(dim);
  r.expectEnd();
  return fv;
}

namespace {

std::string hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

nlohmann::json mapSettings(const PipelineConfig& c, const std::optional<WeightStore>& w) {
  nlohmann::json j;
  j["source"] = toString(c.source);
  if (c.source == SourceKind::ConvMap) {
    j["backbone"] = "vgg16-pool2";
    j["weights_crc32"] = w ? hex32(w->checksum) : "";
    j["channel_order"] = c.preprocess.order == ChannelOrder::BGR ? "BGR" : "RGB";
    j["channel_means"] = c.preprocess.means;
  } else {
    j["grayscale_side"] = c.grayscaleSide;
  }
  return j;
}

nlohmann::json featureSettings(const PipelineConfig& c, const std::optional<WeightStore>& w) {
  nlohmann::json j;
  j["maps"] = mapSettings(c, w);
  j["descriptor"] = toString(c.descriptor);
  if (c.descriptor == DescriptorKind::SiftBow) {
    j["patch_size"] = c.grid.patchSize;
    j["step"] = c.grid.step;
  } else {
    j["binarization"] = "otsu-256";
  }
  return j;
}

template <typename Decode>
auto readCache(const fs::path& path, Decode decode) {
  try {
    return decode(readFileBytes(path), path.string());
  } catch (const IntegrityError& e) {
    throw IntegrityError(std::string("corrupt cache entry: ") + e.what() + "; delete " + path.string() + " to re-extract");
  } catch (const FormatError& e) {
    throw IntegrityError(std::string("corrupt cache entry: ") + e.what() + "; delete " + path.string() + " to re-extract");
  }
}

}  // namespace

FeatureExtractor::FeatureExtractor(PipelineConfig config) : config_(std::move(config)) {
  if (config_.source == SourceKind::ConvMap) {
    if (config_.weightsPath.empty()) {
      throw ConfigurationError("the convmap source needs a weights file (--weights)");
    }
    if (!fs::exists(config_.weightsPath)) {
      throw ConfigurationError("weights file not found: " + config_.weightsPath.string());
    }
    weights_ = loadWeights(config_.weightsPath);
  }
  if (config_.descriptor == DescriptorKind::SiftBow) config_.grid.validate();
  mapHash_ = sha256Hex(mapSettings(config_, weights_).dump());
  featureHash_ = sha256Hex(featureSettings(config_, weights_).dump());
}

nlohmann::json FeatureExtractor::settings() const { return featureSettings(config_, weights_); }

fs::path FeatureExtractor::mapCachePath(const std::string& contentHash) const {
  return config_.cacheDir / "maps" / (sha256Hex(contentHash + mapHash_) + ".cdmd");
}

fs::path FeatureExtractor::featureCachePath(const std::string& contentHash) const {
  const char* ext = config_.descriptor == DescriptorKind::SiftBow ? ".cdsd" : ".cdfv";
  return config_.cacheDir / "features" / (sha256Hex(contentHash + featureHash_) + ext);
}

ConvMapSet FeatureExtractor::maps(const std::vector<std::uint8_t>& imageBytes,
                                  const std::string& contentHash, const fs::path& name,
                                  bool* cacheHit) const {
  if (cacheHit) *cacheHit = false;
  if (config_.source == SourceKind::Grayscale) {
    return grayscaleMapSet(decodeImage(imageBytes, name), config_.grayscaleSide);
  }
  const bool caching = !config_.cacheDir.empty();
  const fs::path cachePath = caching ? mapCachePath(contentHash) : fs::path{};
  if (caching && fs::exists(cachePath)) {
    Tensor t = readCache(cachePath, decodeMapDump);
    if (t.height() != BackboneSpec::kOutputSide || t.width() != BackboneSpec::kOutputSide ||
        t.channels() != BackboneSpec::kOutputChannels) {
      throw IntegrityError("corrupt cache entry: wrong map shape in " + cachePath.string() +
                           "; delete it to re-extract");
    }
    if (cacheHit) *cacheHit = true;
    return {std::move(t), SourceKind::ConvMap};
  }
  ConvMapSet m = forwardToPool2(preprocessImage(decodeImage(imageBytes, name), config_.preprocess), *weights_);
  if (caching) writeFileAtomic(cachePath, encodeMapDump(m.maps));
  return m;
}

std::vector<float> FeatureExtractor::descriptors(const fs::path& image, bool* cacheHit) const {
  if (config_.descriptor != DescriptorKind::SiftBow) throw std::logic_error("descriptors() needs sift-bow");
  if (cacheHit) *cacheHit = false;
  const auto bytes = readFileBytes(image);
  const std::string contentHash = sha256Hex(bytes);
  const bool caching = !config_.cacheDir.empty();
  const fs::path cachePath = caching ? featureCachePath(contentHash) : fs::path{};
  if (caching && fs::exists(cachePath)) {
    if (cacheHit) *cacheHit = true;
    return readCache(cachePath, decodeDescriptorDump);
  }
  auto m = descriptorMatrix(denseSift(maps(bytes, contentHash, image), config_.grid));
  if (caching) writeFileAtomic(cachePath, encodeDescriptorDump(m));
  return m;
}

FeatureVector FeatureExtractor::hlacFeatures(const fs::path& image, bool* cacheHit) const {
  if (config_.descriptor != DescriptorKind::Hlac) throw std::logic_error("hlacFeatures() needs hlac");
  if (cacheHit) *cacheHit = false;
  const auto bytes = readFileBytes(image);
  const std::string contentHash = sha256Hex(bytes);
  const bool caching = !config_.cacheDir.empty();
  const fs::path cachePath = caching ? featureCachePath(contentHash) : fs::path{};
  const std::size_t expectedDim =
      (config_.source == SourceKind::ConvMap ? BackboneSpec::kOutputChannels : 1) * kHlacDim;
  if (caching && fs::exists(cachePath)) {
    FeatureVector fv = readCache(cachePath, decodeFeatureVector);
    if (fv.kind != FeatureKind::Hlac || fv.values.size() != expectedDim) {
      throw IntegrityError("corrupt cache entry: unexpected kind or dim in " + cachePath.string() +
                           "; delete it to re-extract");
    }
    fv.sourceKind = config_.source;
    if (cacheHit) *cacheHit = true;
    return fv;
  }
  FeatureVector fv = hlacConcat(maps(bytes, contentHash, image));
  if (caching) writeFileAtomic(cachePath, encodeFeatureVector(fv));
  return fv;
}

ExtractionStats FeatureExtractor::extractMaps(const DatasetManifest& manifest,
                                              const MapProgress& progress) const {
  if (config_.source != SourceKind::ConvMap) throw ConfigurationError("map extraction needs the convmap source");
  if (config_.cacheDir.empty()) throw ConfigurationError("map extraction needs a cache directory");
  ExtractionStats stats;
  stats.images = manifest.entries.size();
  std::vector<char> hits(manifest.entries.size(), 0);
  std::mutex progressMutex;
  parallelFor(manifest.entries.size(), config_.workers, [&](std::size_t i) {
    const fs::path p = manifest.absolutePath(manifest.entries[i]);
    const auto bytes = readFileBytes(p);
    bool hit = false;
    maps(bytes, sha256Hex(bytes), p, &hit);
    hits[i] = hit ? 1 : 0;
    if (progress) {
      std::lock_guard lock(progressMutex);
      progress(i, manifest.entries[i], hit);
    }
  });
  stats.cacheHits = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1));
  stats.computed = stats.images - stats.cacheHits;
  return stats;
}

// ---------------------------------------------------------------------------
// Experiment

void finalizeMetrics(EvalReport& r) {
  const std::size_t k = r.labels.size();
  if (r.confusion.size() != k) throw std::invalid_argument("confusion matrix size does not match labels");
  std::size_t total = 0;
  std::size_t correct = 0;
  r.perClassRecall.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t rowSum = 0;
    for (std::size_t j = 0; j < k; ++j) rowSum += r.confusion[i][j];
    total += rowSum;
    correct += r.confusion[i][i];
    r.perClassRecall[i] = rowSum ? static_cast<double>(r.confusion[i][i]) / static_cast<double>(rowSum) : 0.0;
  }
  r.testCount = total;
  r.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  double sum = 0.0;
  for (double v : r.perClassRecall) sum += v;
  r.meanRecall = k ? sum / static_cast<double>(k) : 0.0;
}

EvalReport runExperiment(const DatasetManifest& manifest, const SplitSpec& splitSpec,
                         const PipelineConfig& config, SvmModel* modelOut) {
  const FeatureExtractor extractor(config);
  const Split sp = split(manifest, splitSpec);

  std::vector<DatasetEntry> all = sp.train;
  all.insert(all.end(), sp.test.begin(), sp.test.end());
  const std::size_t nTrain = sp.train.size();

  EvalReport report;
  report.datasetName = manifest.datasetName;
  report.descriptor = toString(config.descriptor);
  report.source = toString(config.source);
  report.labels = manifest.labels();
  report.manifestHash = manifest.hash;
  report.splitHash = sp.hash;
  report.trainCount = nTrain;

  std::vector<char> hits(all.size(), 0);
  std::vector<FeatureVector> features(all.size());

  if (config.descriptor == DescriptorKind::Hlac) {
    parallelFor(all.size(), config.workers, [&](std::size_t i) {
      bool hit = false;
      features[i] = extractor.hlacFeatures(manifest.absolutePath(all[i]), &hit);
      hits[i] = hit;
    });
  } else {
    std::vector<std::vector<float>> desc(all.size());
    parallelFor(all.size(), config.workers, [&](std::size_t i) {
      bool hit = false;
      desc[i] = extractor.descriptors(manifest.absolutePath(all[i]), &hit);
      hits[i] = hit;
    });
    Codebook codebook;
    if (!config.codebookPath.empty()) {
      codebook = loadCodebook(config.codebookPath);
      if (codebook.dim != kSiftDim) throw FormatError(config.codebookPath.string() + ": codebook dim is not 128");
    } else {
      std::vector<float> pool;
      for (std::size_t i = 0; i < nTrain; ++i) pool.insert(pool.end(), desc[i].begin(), desc[i].end());
      pool = subsampleRows(pool, kSiftDim, config.codebookCap, config.codebookSeed);
      codebook = trainCodebook(pool, kSiftDim, config.codebookK, config.kmeansIters,
                               config.codebookSeed, config.workers);
    }
    report.codebookHash = sha256Hex(encodeCodebook(codebook));
    parallelFor(all.size(), config.workers, [&](std::size_t i) {
      features[i] = encodeBow(desc[i], codebook, config.source);
    });
  }
  report.extraction.images = all.size();
  report.extraction.cacheHits = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1));
  report.extraction.computed = report.extraction.images - report.extraction.cacheHits;

  FeatureMatrix xTrain;
  std::vector<std::string> yTrain;
  for (std::size_t i = 0; i < nTrain; ++i) {
    xTrain.appendRow({features[i].values.begin(), features[i].values.end()});
    yTrain.push_back(all[i].label);
  }
  report.featureDim = xTrain.cols;

  MulticlassTrainOptions opts;
  opts.c = config.svmC;
  opts.epochs = config.svmEpochs;
  opts.seed = config.svmSeed;
  opts.workers = config.workers;
  const SvmModel model = trainMulticlass(xTrain, yTrain, opts);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < report.labels.size(); ++i) index[report.labels[i]] = i;
  report.confusion.assign(report.labels.size(), std::vector<std::size_t>(report.labels.size(), 0));
  for (std::size_t i = nTrain; i < all.size(); ++i) {
    const std::string predicted =
        predict(model, std::vector<double>(features[i].values.begin(), features[i].values.end()));
    ++report.confusion[index.at(all[i].label)][index.at(predicted)];
  }
  finalizeMetrics(report);
  if (modelOut) *modelOut = model;

  nlohmann::json cfg = extractor.settings();
  cfg["split"] = {{"train_per_class", splitSpec.trainPerClass},
                  {"per_class", splitSpec.perClass},
                  {"seed", splitSpec.seed}};
  if (config.descriptor == DescriptorKind::SiftBow) {
    cfg["codebook"] = {{"k", config.codebookK},
                       {"max_iters", config.kmeansIters},
                       {"sample_cap", config.codebookCap},
                       {"seed", config.codebookSeed},
                       {"pretrained", !config.codebookPath.empty()}};
  }
  cfg["svm"] = {{"kernel", "linear"},
                {"multiclass", "one-vs-rest"},
                {"c", config.svmC},
                {"epochs", config.svmEpochs},
                {"seed", config.svmSeed}};
  report.config = std::move(cfg);
  return report;
}

// ---------------------------------------------------------------------------
// Reports

std::string reportToJson(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["dataset"] = r.datasetName;
  j["descriptor"] = r.descriptor;
  j["source"] = r.source;
  j["accuracy"] = r.accuracy;
  j["mean_recall"] = r.meanRecall;
  j["labels"] = r.labels;
  j["per_class_recall"] = r.perClassRecall;
  j["confusion"] = r.confusion;
  j["train_count"] = r.trainCount;
  j["test_count"] = r.testCount;
  j["feature_dim"] = r.featureDim;
  j["manifest_hash"] = r.manifestHash;
  j["split_hash"] = r.splitHash;
  if (!r.codebookHash.empty()) j["codebook_hash"] = r.codebookHash;
  j["config"] = nlohmann::ordered_json::parse(r.config.dump());
  return j.dump(2) + "\n";
}

EvalReport reportFromJson(const std::string& text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.datasetName = j.at("dataset").get<std::string>();
    r.descriptor = j.at("descriptor").get<std::string>();
    r.source = j.at("source").get<std::string>();
    r.accuracy = j.at("accuracy").get<double>();
    r.meanRecall = j.at("mean_recall").get<double>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.perClassRecall = j.at("per_class_recall").get<std::vector<double>>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    r.trainCount = j.at("train_count").get<std::size_t>();
    r.testCount = j.at("test_count").get<std::size_t>();
    r.featureDim = j.at("feature_dim").get<std::size_t>();
    r.manifestHash = j.at("manifest_hash").get<std::string>();
    r.splitHash = j.at("split_hash").get<std::string>();
    if (j.contains("codebook_hash")) r.codebookHash = j.at("codebook_hash").get<std::string>();
    r.config = j.at("config");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string approachName(const EvalReport& r) {
  const std::string d = r.descriptor == "sift-bow" ? "SIFT+BoW" : r.descriptor == "hlac" ? "HLAC" : r.descriptor;
  const std::string s = r.source == "convmap" ? "ConvMaps" : r.source == "grayscale" ? "Grayscale" : r.source;
  return d + ", " + s;
}

namespace {

std::string fmt2(double v, bool sign = false) {
  // Avoid printing "-0.00" for deltas that round to zero.
  if (std::abs(v) < 0.005) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, sign ? "%+.2f" : "%.2f", v);
  return buf;
}

std::string row(const std::string& left, const std::string& right) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %8s\n", left.c_str(), right.c_str());
  return buf;
}

const std::string kRule(33, '-');

}  // namespace

std::string reportTable(const EvalReport& r) {
  std::string out = row("Approach", "%") + kRule + "\n";
  out += row(approachName(r), fmt2(r.accuracy * 100.0));
  out += row("  mean per-class recall", fmt2(r.meanRecall * 100.0));
  return out + kRule + "\n";
}

std::string confusionCsv(const EvalReport& r) {
  std::ostringstream os;
  os << "true\\predicted";
  for (const auto& l : r.labels) os << ',' << l;
  os << '\n';
  for (std::size_t i = 0; i < r.labels.size(); ++i) {
    os << r.labels[i];
    for (std::size_t v : r.confusion[i]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

Comparison compareReport(const EvalReport& a, const EvalReport& b) {
  if (a.splitHash != b.splitHash || a.manifestHash != b.manifestHash) {
    throw std::invalid_argument("reports come from different datasets or splits (split hashes " +
                                a.splitHash.substr(0, 12) + " vs " + b.splitHash.substr(0, 12) + ")");
  }
  Comparison c;
  c.approachA = approachName(a);
  c.approachB = approachName(b);
  c.percentA = a.accuracy * 100.0;
  c.percentB = b.accuracy * 100.0;
  c.deltaPoints = (b.accuracy - a.accuracy) * 100.0;
  return c;
}

std::string formatComparison(const Comparison& c) {
  std::string out = row("Approach", "%") + kRule + "\n";
  out += row(c.approachA, fmt2(c.percentA));
  out += row(c.approachB, fmt2(c.percentB));
  out += kRule + "\n";
  out += row("Delta (points)", fmt2(c.deltaPoints, true));
  return out;
}

}  // namespace convdesc
