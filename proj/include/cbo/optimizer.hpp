#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cbo/batching.hpp"
#include "cbo/ensemble.hpp"
#include "cbo/objective.hpp"
#include "cbo/params.hpp"

namespace cbo {

enum class StopReason { criterion_met, max_iters, restarts_exhausted, caller_stop };

const char* to_string(StopReason r);

struct TraceEntry {
  std::size_t iteration = 0;
  /// Batch index within the iteration.
  std::size_t theta = 0;
  std::vector<double> x_star;
  /// Loss estimate at x*: mini-batch estimate on the batch's data subset, or the full loss.
  double loss = 0.0;
};

struct RunReport {
  std::vector<TraceEntry> consensus_trace;
  std::vector<double> final_consensus;
  /// Full loss L at final_consensus.
  double final_loss = 0.0;
  StopReason stop_reason = StopReason::max_iters;
  std::size_t iterations_used = 0;
  std::size_t batch_steps = 0;
  std::size_t restarts = 0;
  /// Full loss at x* recorded at each stall, in order.
  std::vector<double> stall_losses;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

/// State visible to observers after each batch step.
struct BatchEvent {
  std::size_t iteration;
  std::size_t theta;
  /// Batch steps completed so far, counting this one.
  std::size_t batch_step;
  std::span<const double> x_star;
  /// Whether x* was recomputed at this step (false while frozen between refreshes).
  bool refreshed;
  double sigma;
  double beta;
  const Ensemble& ensemble;
};

/// Moves `targets` towards `x_star`. Replaces the built-in schemes when set in RunHooks.
using UpdateKernel =
    std::function<void(Ensemble& ensemble, std::span<const std::size_t> targets,
                       std::span<const double> x_star, double lambda, double sigma, double gamma,
                       Rng& rng)>;

struct RunHooks {
  /// Called after every batch step; returning false ends the run with caller_stop.
  std::function<bool(const BatchEvent&)> on_batch;
  /// x* is recomputed only on every refresh_every-th batch step and frozen in between.
  std::size_t refresh_every = 1;
  UpdateKernel kernel;
};

/// Runs the mini-batch consensus optimizer from an initial ensemble.
///
/// Each iteration schedules particle batches, and for every batch evaluates the
/// losses (full or on a fresh data subset), computes x*, moves the batch (partial)
/// or the whole ensemble (full), and compares x* with the previous one. With
/// stalls enabled, a stalled consensus triggers a Gaussian kick of all particles
/// until the loss recorded at successive stalls stops decreasing.
///
/// Throws NonFiniteLossError if the objective returns a non-finite value.
RunReport run_optimizer(const Objective& obj, const CboParams& params, Ensemble ensemble,
                        const RunHooks& hooks = {});

RunReport run_optimizer(const Objective& obj, const CboParams& params, const InitSpec& init,
                        std::uint64_t seed, const RunHooks& hooks = {});

}  // namespace cbo
