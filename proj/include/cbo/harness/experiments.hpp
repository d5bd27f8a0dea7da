#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cbo/harness/config.hpp"
#include "cbo/optimizer.hpp"

namespace cbo::harness {

struct RunRecord {
  std::uint64_t seed = 0;
  bool success = false;
  /// Euclidean distance of the final point to the known minimizer; inf after divergence.
  double final_distance = 0.0;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
  bool diverged = false;
  std::vector<double> final_x;
};

struct SuccessRow {
  std::string method;
  std::size_t repetitions = 0;
  double success_rate = 0.0;
  double mean_distance = 0.0;
  double mean_iterations = 0.0;
  double mean_wall_ms = 0.0;
};

struct SuccessTable {
  std::vector<SuccessRow> rows;
  /// runs[k] belongs to rows[k], in repetition order.
  std::vector<std::vector<RunRecord>> runs;
};

/// R seeded runs per method. A run succeeds when every coordinate of the final point is
/// within the threshold of the known minimizer. Writes runs_<method>.csv, summary.csv and
/// config.json under the output directory when `write_files` is set.
SuccessTable run_success_experiment(const ExperimentConfig& config, bool write_files = true);

struct EpochRow {
  std::size_t epoch = 0;
  double test_accuracy = 0.0;
  double train_loss_estimate = 0.0;
  double wall_ms = 0.0;
};

struct TrainingResult {
  std::string method;
  std::string data_source;
  std::vector<EpochRow> epochs;
  std::string stop_reason;
};

/// Trains the softmax classifier with each method and scores x* on the test set after
/// every epoch of ceil(n/m) data-batch draws. Writes train_<method>.csv.
std::vector<TrainingResult> run_training_experiment(const ExperimentConfig& config,
                                                    bool write_files = true);

struct DiagnosticsReport {
  std::vector<std::pair<AnchoredSpec, AnchoredFit>> anchored;
  std::optional<ConvergenceCertificate> certificate;
  std::vector<LaplaceGap> laplace;
  std::optional<MomentTrace> semidiscrete;
};

/// Runs whichever diagnostics the config lists; writes anchored.csv, certificate.csv,
/// laplace.csv and semidiscrete.csv for the parts present.
DiagnosticsReport run_diagnostics(const ExperimentConfig& config, bool write_files = true);

}  // namespace cbo::harness
