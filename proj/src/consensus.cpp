#include "cbo/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbo/errors.hpp"

namespace cbo {

namespace {

void check_losses(std::span<const double> losses) {
  if (losses.empty()) throw DomainError("consensus of an empty particle subset");
  for (double l : losses)
    if (!std::isfinite(l)) throw InputError("non-finite loss passed to consensus");
}

double min_loss(std::span<const double> losses) {
  return *std::min_element(losses.begin(), losses.end());
}

template <class RowAt>
ConsensusPoint weighted_impl(RowAt row_at, std::size_t dim, std::span<const double> losses,
                             double beta, std::vector<std::size_t> source) {
  check_losses(losses);
  if (!(beta > 0.0)) throw InputError("beta must be positive");

  const double shift = min_loss(losses);
  ConsensusPoint cp;
  cp.x_star.assign(dim, 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    const double w = std::exp(-beta * (losses[t] - shift));
    total += w;
    auto x = row_at(t);
    for (std::size_t i = 0; i < dim; ++i) cp.x_star[i] += w * x[i];
  }
  // total >= 1 because the minimizing particle has weight exactly 1.
  for (double& v : cp.x_star) v /= total;

  // Rounding can push a coordinate just past the hull when all points agree.
  for (std::size_t i = 0; i < dim; ++i) {
    double lo = row_at(0)[i], hi = lo;
    for (std::size_t t = 1; t < losses.size(); ++t) {
      lo = std::min(lo, row_at(t)[i]);
      hi = std::max(hi, row_at(t)[i]);
    }
    cp.x_star[i] = std::clamp(cp.x_star[i], lo, hi);
  }

  cp.log_total_weight = -beta * shift + std::log(total);
  cp.source_batch = std::move(source);
  return cp;
}

template <class RowAt>
ConsensusPoint argmin_impl(RowAt row_at, std::size_t dim, std::span<const double> losses,
                           std::vector<std::size_t> source) {
  if (losses.empty()) throw DomainError("consensus of an empty particle subset");
  std::size_t best = 0;
  for (std::size_t t = 1; t < losses.size(); ++t)
    if (losses[t] < losses[best]) best = t;
  ConsensusPoint cp;
  auto x = row_at(best);
  cp.x_star.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(dim));
  cp.source_batch = std::move(source);
  return cp;
}

std::vector<std::size_t> iota_indices(std::size_t k) {
  std::vector<std::size_t> v(k);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void check_rows(std::span<const double> rows, std::size_t dim, std::size_t k) {
  if (dim == 0 || rows.size() != k * dim)
    throw InputError("position block does not match the number of losses");
}

}  // namespace

ConsensusPoint weighted_consensus(const Ensemble& ensemble, std::span<const std::size_t> indices,
                                  std::span<const double> losses, double beta) {
  if (indices.size() != losses.size()) throw InputError("indices and losses differ in length");
  return weighted_impl([&](std::size_t t) { return ensemble.particle(indices[t]); },
                       ensemble.dim(), losses, beta, {indices.begin(), indices.end()});
}

ConsensusPoint weighted_consensus(std::span<const double> rows, std::size_t dim,
                                  std::span<const double> losses, double beta) {
  check_rows(rows, dim, losses.size());
  return weighted_impl([&](std::size_t t) { return rows.subspan(t * dim, dim); }, dim, losses,
                       beta, iota_indices(losses.size()));
}

ConsensusPoint argmin_consensus(const Ensemble& ensemble, std::span<const std::size_t> indices,
                                std::span<const double> losses) {
  if (indices.size() != losses.size()) throw InputError("indices and losses differ in length");
  return argmin_impl([&](std::size_t t) { return ensemble.particle(indices[t]); },
                     ensemble.dim(), losses, {indices.begin(), indices.end()});
}

ConsensusPoint argmin_consensus(std::span<const double> rows, std::size_t dim,
                                std::span<const double> losses) {
  check_rows(rows, dim, losses.size());
  return argmin_impl([&](std::size_t t) { return rows.subspan(t * dim, dim); }, dim, losses,
                     iota_indices(losses.size()));
}

double log_mean_weight(std::span<const double> losses, double beta) {
  check_losses(losses);
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  const double shift = min_loss(losses);
  double total = 0.0;
  for (double l : losses) total += std::exp(-beta * (l - shift));
  return -beta * shift + std::log(total / static_cast<double>(losses.size()));
}

double laplace_estimate(std::span<const double> losses, double beta) {
  check_losses(losses);
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  const double shift = min_loss(losses);
  double total = 0.0;
  for (double l : losses) total += std::exp(-beta * (l - shift));
  return shift - std::log(total / static_cast<double>(losses.size())) / beta;
}

}  // namespace cbo
