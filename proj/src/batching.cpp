#include "cbo/batching.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cbo/errors.hpp"

namespace cbo {

BatchPlan::BatchPlan(std::size_t n_particles, std::size_t batch_size)
    : BatchPlan(n_particles, batch_size, {}) {}

BatchPlan::BatchPlan(std::size_t n_particles, std::size_t batch_size,
                     std::vector<std::size_t> remainder)
    : n_(n_particles), m_(batch_size), remainder_(std::move(remainder)) {
  if (m_ == 0) throw ConfigError("particle batch size must be at least 1");
  if (m_ > n_)
    throw ConfigError("particle batch size " + std::to_string(m_) + " exceeds particle count " +
                      std::to_string(n_));
  if (remainder_.size() >= m_) throw ConfigError("remainder must be shorter than the batch size");
  auto sorted = remainder_;
  std::ranges::sort(sorted);
  if (std::ranges::adjacent_find(sorted) != sorted.end())
    throw ConfigError("remainder contains duplicate indices");
  if (!sorted.empty() && sorted.back() >= n_) throw ConfigError("remainder index out of range");
}

std::vector<std::vector<std::size_t>> next_particle_batches(BatchPlan& plan, Rng& rng) {
  std::vector<std::size_t> order = std::move(plan.remainder_);
  const std::size_t carried = order.size();
  order.resize(carried + plan.n_);
  std::iota(order.begin() + static_cast<std::ptrdiff_t>(carried), order.end(), std::size_t{0});
  std::shuffle(order.begin() + static_cast<std::ptrdiff_t>(carried), order.end(), rng);

  const std::size_t q = order.size() / plan.m_;
  std::vector<std::vector<std::size_t>> batches;
  batches.reserve(q);
  auto it = order.begin();
  for (std::size_t b = 0; b < q; ++b) {
    batches.emplace_back(it, it + static_cast<std::ptrdiff_t>(plan.m_));
    it += static_cast<std::ptrdiff_t>(plan.m_);
  }
  plan.remainder_.assign(it, order.end());
  return batches;
}

DataBatch sample_data_batch(std::size_t n, std::size_t m, Rng& rng) {
  if (m == 0) throw ConfigError("data batch size must be at least 1");
  if (m > n)
    throw ConfigError("data batch size " + std::to_string(m) + " exceeds sample count " +
                      std::to_string(n));
  // Partial Fisher-Yates: the first m slots end up a uniform m-subset in random order.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t t = 0; t < m; ++t) std::swap(pool[t], pool[t + rng.below(n - t)]);
  pool.resize(m);
  return DataBatch{std::move(pool)};
}

double minibatch_loss(const Objective& obj, std::span<const double> x, const DataBatch& batch) {
  const std::size_t n = obj.n_samples();
  if (n == 0) throw UnsupportedError(obj.name() + " is not a finite-sum objective");
  if (batch.indices.empty()) throw DomainError("empty data batch");
  for (std::size_t i : batch.indices)
    if (i >= n) throw InputError("data index " + std::to_string(i) + " out of range");
  return obj.eval_batch(x, batch.indices);
}

}  // namespace cbo
