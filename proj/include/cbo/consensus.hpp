#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbo/ensemble.hpp"

namespace cbo {

struct ConsensusPoint {
  std::vector<double> x_star;
  /// log of sum_j exp(-beta L_j), reconstructed from the shifted sum.
  /// Zero for the argmin variant, which selects a single particle.
  double log_total_weight = 0.0;
  /// Particle indices the point was computed from.
  std::vector<std::size_t> source_batch;
};

/// Gibbs-weighted average sum_j x_j exp(-beta L_j) / sum_j exp(-beta L_j) over the
/// particles in `indices`; losses[t] belongs to particle indices[t].
///
/// Weights are taken relative to the smallest loss in the batch, so the result is
/// exact for any beta (no underflow of the normalizer).
ConsensusPoint weighted_consensus(const Ensemble& ensemble, std::span<const std::size_t> indices,
                                  std::span<const double> losses, double beta);

/// Same as above for a contiguous row-major k×dim block.
ConsensusPoint weighted_consensus(std::span<const double> rows, std::size_t dim,
                                  std::span<const double> losses, double beta);

/// Position of the lowest-loss particle; ties go to the first occurrence.
ConsensusPoint argmin_consensus(const Ensemble& ensemble, std::span<const std::size_t> indices,
                                std::span<const double> losses);
ConsensusPoint argmin_consensus(std::span<const double> rows, std::size_t dim,
                                std::span<const double> losses);

/// log( (1/k) sum_j exp(-beta L_j) ), computed with a min-shift.
double log_mean_weight(std::span<const double> losses, double beta);

/// Soft-min -(1/beta) log( (1/k) sum_j exp(-beta L_j) ); lies in [min L, mean L].
double laplace_estimate(std::span<const double> losses, double beta);

}  // namespace cbo
