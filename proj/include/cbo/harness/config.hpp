#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cbo/baselines.hpp"
#include "cbo/diagnostics.hpp"
#include "cbo/ensemble.hpp"
#include "cbo/harness/blobs.hpp"
#include "cbo/objective.hpp"
#include "cbo/params.hpp"

namespace cbo::harness {

struct DatasetSpec {
  enum class Source { idx, blobs };
  Source source = Source::blobs;
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  /// Keep only the first n items of each file; 0 keeps everything.
  std::size_t train_limit = 0;
  std::size_t test_limit = 0;
  /// With source idx: use the blobs below when any IDX file is missing.
  bool fallback_to_blobs = false;
  BlobSpec blobs;
};

struct ObjectiveSpec {
  enum class Kind { rastrigin, oscillatory, quadratic, softmax_net };
  Kind kind = Kind::rastrigin;
  std::size_t dim = 1;
  // rastrigin
  double shift = 0.0;
  double lift = 0.0;
  // oscillatory
  std::size_t n_samples = 20;
  std::uint64_t seed = 0;
  // quadratic; no centers means the single center 0
  std::vector<std::vector<double>> centers;
  double scale = 1.0;
  // softmax_net
  DatasetSpec dataset;
};

struct MethodSpec {
  enum class Kind { cbo, isotropic_cbo, sgd };
  std::string name;
  Kind kind = Kind::cbo;
  /// Used by cbo and isotropic_cbo.
  CboParams cbo;
  Heaviside heaviside = Heaviside::off;
  double heaviside_eps = 0.01;
  /// Used by sgd; the seed field is replaced per repetition.
  SgdParams sgd;
};

struct SeedPolicy {
  std::uint64_t base = 0;
  std::uint64_t stride = 1;
  std::uint64_t for_repetition(std::size_t r) const { return base + stride * r; }
};

struct TrainingSpec {
  std::size_t epochs = 10;
  /// Training points used for the per-epoch loss estimate (the first n of the set).
  std::size_t loss_subset = 2000;
};

struct AnchoredSpec {
  AnchoredScheme scheme = AnchoredScheme::exact_gbm;
  double lambda = 1.0;
  double sigma = 1.0;
  double gamma = 0.01;
  std::size_t dim = 5;
  std::size_t particles = 10000;
  std::size_t steps = 200;
};

struct CertificateSpec {
  double loss_min = 0.0;
  /// Bound on the Hessian norm; defaults to the objective's own bound when it has one.
  std::optional<double> curvature;
};

struct LaplaceSpec {
  std::vector<double> betas{1.0, 10.0, 100.0, 1000.0};
  std::size_t samples = 10000;
};

struct SemidiscreteSpec {
  std::size_t refresh_every = 10;
};

struct DiagnosticsSpec {
  std::vector<AnchoredSpec> anchored;
  std::optional<CertificateSpec> certificate;
  std::optional<LaplaceSpec> laplace;
  std::optional<SemidiscreteSpec> semidiscrete;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ObjectiveSpec objective;
  std::vector<MethodSpec> methods;
  InitSpec init = InitSpec::uniform(-3.0, 3.0);
  std::size_t repetitions = 1;
  /// Per-coordinate success threshold; empty disables the success criterion.
  std::optional<double> success_threshold = 0.25;
  SeedPolicy seeds;
  std::filesystem::path output_dir = "results";
  std::size_t threads = 1;
  /// Wall-clock columns are written as 0 when false, so reruns give identical files.
  bool record_timing = true;
  TrainingSpec training;
  DiagnosticsSpec diagnostics;

  /// Throws ConfigError naming the field.
  void validate() const;
};

/// Parses JSON text (comments allowed). Unknown keys are rejected. Relative dataset paths
/// are resolved against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                              const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// The fully populated config as pretty-printed JSON, defaults included.
std::string describe_config(const ExperimentConfig& config);

/// Closest candidate within edit distance 2, or empty.
std::string suggest_key(const std::string& key, const std::vector<std::string>& candidates);

struct Dataset {
  std::shared_ptr<const LabeledData> train;
  std::shared_ptr<const LabeledData> test;
  /// "idx" or "blobs"
  std::string source;
};

Dataset load_dataset(const DatasetSpec& spec);

/// Builds the objective. Softmax objectives also fill `dataset` when given.
std::unique_ptr<Objective> build_objective(const ObjectiveSpec& spec, Dataset* dataset = nullptr);

}  // namespace cbo::harness
