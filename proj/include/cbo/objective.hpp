#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbo {

struct KnownMinimum {
  std::vector<double> x;
  double value = 0.0;
};

/// Evaluation interface for a loss L: R^d -> R.
///
/// Finite-sum objectives (n_samples() > 0) also expose the per-sample losses l_i
/// with L(x) = (1/n) sum_i l_i(x). Implementations must be safe to call
/// concurrently; they hold no mutable state.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double eval(std::span<const double> x) const = 0;

  virtual std::size_t n_samples() const { return 0; }
  virtual double eval_sample(std::span<const double> x, std::size_t i) const;
  /// Mean of l_i(x) over `indices`. Overridden where a batch can share work.
  virtual double eval_batch(std::span<const double> x, std::span<const std::size_t> indices) const;

  virtual bool has_gradient() const { return false; }
  /// Writes grad l_i(x) into `out` (size dim()).
  virtual void grad_sample(std::span<const double> x, std::size_t i, std::span<double> out) const;

  virtual std::optional<KnownMinimum> known_min() const { return std::nullopt; }
  /// Bound c_L on the Hessian diagonal and spectral radius, when one is known analytically.
  virtual std::optional<double> curvature_bound() const { return std::nullopt; }

  virtual std::string name() const = 0;
};

}  // namespace cbo
