// convdesc: hand-crafted descriptors on convolutional maps versus grayscale.
//
//   convdesc extract-maps   --dataset D --weights W
//   convdesc train-codebook --dataset D --train-per-class N --out codebook.cdcb
//   convdesc run            --dataset D --descriptor hlac --source grayscale --train-per-class N --out dir
//   convdesc compare        reportA.json reportB.json
//   convdesc dump-map       --image img.png --weights W --out map.cdmd
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data/format/io
// error, 3 integrity error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "convdesc/binary_io.hpp"
#include "convdesc/bow.hpp"
#include "convdesc/dataset.hpp"
#include "convdesc/errors.hpp"
#include "convdesc/parallel.hpp"
#include "convdesc/svm.hpp"
#include "convdesc/vgg.hpp"

namespace fs = std::filesystem;
using namespace convdesc;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kIntegrity = 3 };

struct Options {
  std::string dataset;
  std::string layout = "multiclass";
  std::string descriptor = "hlac";
  std::string source = "grayscale";
  std::string weights;
  std::string codebook;
  std::string out;
  std::string image;
  std::size_t trainPerClass = 0;
  std::vector<std::string> trainCounts;
  std::uint64_t seed = 0;
  double svmC = 1.0;
  std::size_t svmEpochs = 1000;
  std::size_t k = 1000;
  std::size_t kmeansIters = 100;
  std::size_t codebookCap = 200000;
  std::size_t patchSize = 16;
  std::size_t step = 8;
  std::size_t workers = defaultWorkerCount();
  std::vector<std::string> reports;
};

fs::path cacheDir() {
  if (const char* env = std::getenv("CONVDESC_CACHE_DIR"); env && *env) return env;
  return ".convdesc-cache";
}

void addDatasetFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--dataset", o.dataset, "Dataset root directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--layout", o.layout, "Dataset layout")
      ->check(CLI::IsMember({"multiclass", "posneg"}))
      ->capture_default_str();
  cmd->add_option("--workers", o.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

void addSplitFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--train-per-class", o.trainPerClass, "Training images sampled per class");
  cmd->add_option("--train-counts", o.trainCounts,
                  "Explicit per-label training counts, e.g. pos=550 neg=500 (overrides --train-per-class)");
  cmd->add_option("--seed", o.seed, "Seed for the split, codebook and SVM")->capture_default_str();
}

void addPipelineFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("--source", o.source, "Map source")
      ->check(CLI::IsMember({"convmap", "grayscale"}))
      ->capture_default_str();
  cmd->add_option("--weights", o.weights, "CDWT weight file (convmap source)");
  cmd->add_option("--patch-size", o.patchSize, "Dense SIFT patch side (pixels)")->capture_default_str();
  cmd->add_option("--step", o.step, "Dense SIFT grid step (pixels)")->capture_default_str();
  cmd->add_option("--k", o.k, "Codebook size")->capture_default_str();
  cmd->add_option("--kmeans-iters", o.kmeansIters, "Maximum Lloyd iterations")->capture_default_str();
  cmd->add_option("--codebook-cap", o.codebookCap, "Descriptor sample cap for codebook training")
      ->capture_default_str();
}

SplitSpec splitSpec(const Options& o) {
  SplitSpec s;
  s.seed = o.seed;
  s.trainPerClass = o.trainPerClass;
  for (const auto& kv : o.trainCounts) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--train-counts", "expected label=count, got " + kv);
    try {
      s.perClass[kv.substr(0, eq)] = std::stoul(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--train-counts", "bad count in " + kv);
    }
  }
  if (s.perClass.empty() && s.trainPerClass == 0) {
    throw CLI::ValidationError("--train-per-class", "a positive --train-per-class or --train-counts is required");
  }
  return s;
}

PipelineConfig pipelineConfig(const Options& o) {
  PipelineConfig c;
  c.descriptor = parseDescriptorKind(o.descriptor);
  c.source = parseSourceKind(o.source);
  c.weightsPath = o.weights;
  c.codebookPath = o.codebook;
  c.grid = {o.patchSize, o.step};
  c.codebookK = o.k;
  c.kmeansIters = o.kmeansIters;
  c.codebookCap = o.codebookCap;
  c.codebookSeed = o.seed;
  c.svmC = o.svmC;
  c.svmEpochs = o.svmEpochs;
  c.svmSeed = o.seed;
  c.cacheDir = cacheDir();
  c.workers = o.workers;
  return c;
}

int cmdExtractMaps(const Options& o) {
  PipelineConfig c = pipelineConfig(o);
  c.source = SourceKind::ConvMap;
  const DatasetManifest m = scanDataset(o.dataset, parseLayout(o.layout));
  const FeatureExtractor ex(c);
  const ExtractionStats stats = ex.extractMaps(m, [&](std::size_t, const DatasetEntry& e, bool hit) {
    std::printf("%s %s\n", hit ? "cached   " : "extracted", e.path.c_str());
  });
  std::printf("images: %zu, new extractions: %zu, cache hits: %zu (cache: %s)\n", stats.images,
              stats.computed, stats.cacheHits, c.cacheDir.string().c_str());
  return kOk;
}

int cmdTrainCodebook(const Options& o) {
  PipelineConfig c = pipelineConfig(o);
  c.descriptor = DescriptorKind::SiftBow;
  const DatasetManifest m = scanDataset(o.dataset, parseLayout(o.layout));
  const Split sp = split(m, splitSpec(o));
  const FeatureExtractor ex(c);

  std::vector<std::vector<float>> desc(sp.train.size());
  parallelFor(sp.train.size(), c.workers,
              [&](std::size_t i) { desc[i] = ex.descriptors(m.absolutePath(sp.train[i])); });
  std::vector<float> pool;
  for (const auto& d : desc) pool.insert(pool.end(), d.begin(), d.end());
  const std::size_t available = pool.size() / kSiftDim;
  pool = subsampleRows(pool, kSiftDim, c.codebookCap, c.codebookSeed);
  if (pool.size() / kSiftDim < c.codebookK) {
    throw std::invalid_argument("insufficient descriptors: " + std::to_string(pool.size() / kSiftDim) +
                                " available for k = " + std::to_string(c.codebookK));
  }
  const Codebook cb = trainCodebook(pool, kSiftDim, c.codebookK, c.kmeansIters, c.codebookSeed, c.workers);
  saveCodebook(o.out, cb);
  std::printf("descriptors: %zu (sampled %zu)\n", available, pool.size() / kSiftDim);
  std::printf("k: %zu, iterations: %zu%s, final distortion: %.6g\n", cb.k, cb.meta.iterations,
              cb.meta.converged ? " (converged)" : "", cb.meta.finalDistortion);
  std::printf("codebook written to %s\n", o.out.c_str());
  return kOk;
}

int cmdRun(const Options& o) {
  const PipelineConfig c = pipelineConfig(o);
  const DatasetManifest m = scanDataset(o.dataset, parseLayout(o.layout));
  SvmModel model;
  const EvalReport r = runExperiment(m, splitSpec(o), c, &model);

  const fs::path out = o.out;
  fs::create_directories(out);
  auto write = [&](const char* name, const std::string& text) {
    writeFileAtomic(out / name, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  };
  write("report.json", reportToJson(r));
  write("report.txt", reportTable(r));
  write("confusion.csv", confusionCsv(r));
  saveModel(out / "model.cdsv", model);

  std::printf("features: %zu images (%zu extracted, %zu from cache), dim %zu\n", r.extraction.images,
              r.extraction.computed, r.extraction.cacheHits, r.featureDim);
  std::printf("%s: accuracy %.2f%% (mean per-class recall %.2f%%) on %zu test images\n",
              approachName(r).c_str(), r.accuracy * 100.0, r.meanRecall * 100.0, r.testCount);
  std::printf("report written to %s\n", (out / "report.json").string().c_str());
  return kOk;
}

EvalReport readReport(const std::string& arg) {
  fs::path p = arg;
  if (fs::is_directory(p)) p /= "report.json";
  if (!fs::exists(p)) throw IoError("report file not found: " + p.string());
  const auto bytes = readFileBytes(p);
  return reportFromJson(std::string(bytes.begin(), bytes.end()));
}

int cmdCompare(const Options& o) {
  const EvalReport a = readReport(o.reports.at(0));
  const EvalReport b = readReport(o.reports.at(1));
  std::fputs(formatComparison(compareReport(a, b)).c_str(), stdout);
  return kOk;
}

int cmdDumpMap(const Options& o) {
  PipelineConfig c;
  c.source = SourceKind::ConvMap;
  c.weightsPath = o.weights;
  const FeatureExtractor ex(c);  // validates the weights path
  const auto bytes = readFileBytes(o.image);
  const ConvMapSet m = ex.maps(bytes, sha256Hex(bytes), o.image);
  writeFileAtomic(o.out, encodeMapDump(m.maps));
  std::printf("map %zux%zux%zu written to %s\n", m.maps.height(), m.maps.width(), m.maps.channels(),
              o.out.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand-crafted descriptors (dense SIFT + BoW, HLAC) on VGG convolutional maps"};
  app.require_subcommand(1);
  Options o;

  auto* extract = app.add_subcommand("extract-maps", "Compute and cache pool2 maps for every image");
  addDatasetFlags(extract, o);
  extract->add_option("--weights", o.weights, "CDWT weight file")->required();

  auto* codebook = app.add_subcommand("train-codebook", "Train the shared k-means codebook on the training split");
  addDatasetFlags(codebook, o);
  addSplitFlags(codebook, o);
  addPipelineFlags(codebook, o);
  codebook->add_option("--out", o.out, "Output codebook file")->required();

  auto* run = app.add_subcommand("run", "Extract, train and evaluate one (descriptor, source) configuration");
  addDatasetFlags(run, o);
  addSplitFlags(run, o);
  addPipelineFlags(run, o);
  run->add_option("--descriptor", o.descriptor, "Descriptor")
      ->check(CLI::IsMember({"sift-bow", "hlac"}))
      ->capture_default_str();
  run->add_option("--codebook", o.codebook, "Pre-trained codebook (sift-bow); trained on the split if omitted")
      ->check(CLI::ExistingFile);
  run->add_option("--svm-c", o.svmC, "SVM regularization C")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--svm-epochs", o.svmEpochs, "Maximum dual coordinate descent epochs")->capture_default_str();
  run->add_option("--out", o.out, "Output directory for report.json, report.txt, confusion.csv")->required();

  auto* compare = app.add_subcommand("compare", "Print the accuracy table and delta for two reports");
  compare->add_option("reports", o.reports, "Two report.json files (or run output directories): baseline, then candidate")
      ->required()
      ->expected(2);

  auto* dump = app.add_subcommand("dump-map", "Write the pool2 map of one image as a CDMD file");
  dump->add_option("--image", o.image, "Input image")->required()->check(CLI::ExistingFile);
  dump->add_option("--weights", o.weights, "CDWT weight file")->required();
  dump->add_option("--out", o.out, "Output CDMD file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*extract) return cmdExtractMaps(o);
    if (*codebook) return cmdTrainCodebook(o);
    if (*run) return cmdRun(o);
    if (*compare) return cmdCompare(o);
    if (*dump) return cmdDumpMap(o);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kUsage;
  } catch (const IntegrityError& e) {
    std::fprintf(stderr, "integrity error: %s\n", e.what());
    return kIntegrity;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kData;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
  return kUsage;
}
