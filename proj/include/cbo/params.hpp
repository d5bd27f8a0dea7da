#pragma once

#include <cstddef>
#include <limits>
#include <optional>

namespace cbo {

enum class UpdateMode { partial, full };
enum class ConsensusMode { weighted, argmin };
enum class Scheme { euler, splitting, exact_gbm };

/// Per-iteration value of sigma or beta.
struct Schedule {
  enum class Kind { constant, log_decay, geometric };

  Kind kind = Kind::constant;
  double base = 1.0;
  /// Ratio per iteration for geometric schedules.
  double rate = 1.0;
  /// Upper clamp for growing geometric schedules.
  double cap = std::numeric_limits<double>::infinity();

  /// constant: base; log_decay: base / log(k + 2); geometric: base * rate^k, clamped to cap.
  double at(std::size_t k) const;
};

/// Additive Gaussian kick applied when the consensus stalls, with restart bookkeeping.
struct StallConfig {
  bool enabled = false;
  /// Threshold on (1/d)|dx*|^2 for one stalled batch step.
  double epsilon_stall = 1e-6;
  /// Consecutive stalled batch steps before a kick.
  std::size_t consecutive = 10;
  double kick_sigma = 0.0;
  std::size_t max_restarts = 10;
  /// A stall record counts as flat unless it beats the best record by this relative amount.
  double min_rel_decrease = 1e-6;
  /// Flat records in a row that end the run.
  std::size_t patience = 1;
};

struct CboParams {
  double lambda = 1.0;
  double sigma = 1.0;
  double beta = 30.0;
  double gamma = 0.01;

  std::size_t n_particles = 100;
  /// Particle batch size M.
  std::size_t batch_particles = 100;
  /// Data batch size m; empty means the full loss is evaluated.
  std::optional<std::size_t> batch_data;

  UpdateMode update_mode = UpdateMode::partial;
  ConsensusMode consensus_mode = ConsensusMode::weighted;
  Scheme scheme = Scheme::euler;

  Schedule::Kind sigma_schedule = Schedule::Kind::constant;
  double sigma_rate = 1.0;
  Schedule::Kind beta_schedule = Schedule::Kind::constant;
  double beta_rate = 1.0;
  double beta_max = std::numeric_limits<double>::infinity();

  /// When false the run ends only at max_iters, a caller stop, or exhausted restarts.
  bool stop_on_criterion = true;
  double epsilon_stop = 1e-3;
  std::size_t max_iters = 10000;
  StallConfig stall;

  /// Record x* in the trace every this many batch steps; 0 keeps only the final point.
  std::size_t trace_every = 1;

  Schedule sigma_at() const { return {sigma_schedule, sigma, sigma_rate}; }
  Schedule beta_at() const { return {beta_schedule, beta, beta_rate, beta_max}; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

const char* to_string(UpdateMode m);
const char* to_string(ConsensusMode m);
const char* to_string(Scheme s);
const char* to_string(Schedule::Kind k);

}  // namespace cbo
