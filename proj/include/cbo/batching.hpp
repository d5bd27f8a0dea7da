#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbo/objective.hpp"
#include "cbo/rng.hpp"

namespace cbo {

/// Particle-batch scheduler with a carried remainder.
///
/// Each call appends a fresh permutation of {0..N-1} to the indices left over
/// from the previous call and cuts as many full batches of size M as fit.
class BatchPlan {
 public:
  BatchPlan(std::size_t n_particles, std::size_t batch_size);
  BatchPlan(std::size_t n_particles, std::size_t batch_size, std::vector<std::size_t> remainder);

  std::size_t n_particles() const { return n_; }
  std::size_t batch_size() const { return m_; }
  const std::vector<std::size_t>& remainder() const { return remainder_; }

 private:
  friend std::vector<std::vector<std::size_t>> next_particle_batches(BatchPlan&, Rng&);

  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> remainder_;
};

/// Returns floor((N + |R|) / M) batches and leaves the tail in plan.remainder().
/// A batch may repeat an index when a carried index reappears early in the new permutation.
std::vector<std::vector<std::size_t>> next_particle_batches(BatchPlan& plan, Rng& rng);

struct DataBatch {
  std::vector<std::size_t> indices;
};

/// m distinct indices drawn uniformly from the m-subsets of {0..n-1}.
DataBatch sample_data_batch(std::size_t n, std::size_t m, Rng& rng);

/// (1/m) sum_{i in batch} l_i(x): an unbiased estimate of L(x).
double minibatch_loss(const Objective& obj, std::span<const double> x, const DataBatch& batch);

}  // namespace cbo
