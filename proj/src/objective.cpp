#include "cbo/objective.hpp"

#include "cbo/errors.hpp"

namespace cbo {

double Objective::eval_sample(std::span<const double>, std::size_t) const {
  throw UnsupportedError(name() + " is not a finite-sum objective");
}

double Objective::eval_batch(std::span<const double> x,
                             std::span<const std::size_t> indices) const {
  if (indices.empty()) throw DomainError("empty data batch");
  double acc = 0.0;
  for (std::size_t i : indices) acc += eval_sample(x, i);
  return acc / static_cast<double>(indices.size());
}

void Objective::grad_sample(std::span<const double>, std::size_t, std::span<double>) const {
  throw UnsupportedError(name() + " does not provide per-sample gradients");
}

}  // namespace cbo
