#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cbo/rng.hpp"

namespace cbo {

/// N particles in R^d stored row-major, plus the random stream that drives them.
class Ensemble {
 public:
  Ensemble(std::size_t n_particles, std::size_t dim, std::uint64_t seed);
  /// Takes ownership of row-major positions; size must be a multiple of dim.
  Ensemble(std::vector<double> positions, std::size_t dim, std::uint64_t seed);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  std::uint64_t seed() const { return seed_; }

  std::span<double> particle(std::size_t j) { return {x_.data() + j * d_, d_}; }
  std::span<const double> particle(std::size_t j) const { return {x_.data() + j * d_, d_}; }

  std::span<double> positions() { return x_; }
  std::span<const double> positions() const { return x_; }

  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  bool all_finite() const;
  std::vector<double> mean() const;
  /// Sample variance E|X - E X|^2 (population normalization).
  double variance() const;
  /// Sample second moment E|X - a|^2 about a fixed point.
  double second_moment_about(std::span<const double> a) const;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::size_t n_;
  std::size_t d_;
  std::uint64_t seed_;
  std::vector<double> x_;
  Rng rng_;
};

/// Initial distribution of an ensemble.
struct InitSpec {
  enum class Kind { uniform, gaussian, explicit_positions };

  Kind kind = Kind::uniform;
  double low = -1.0;
  double high = 1.0;
  double mean = 0.0;
  double stddev = 1.0;
  /// Row-major N×d, used when kind == explicit_positions.
  std::vector<double> positions;

  static InitSpec uniform(double low, double high);
  static InitSpec gaussian(double mean, double stddev);
  static InitSpec explicit_rows(std::vector<double> positions);
};

/// Draws N i.i.d. particles from `init`. Same (init, n, d, seed) gives a bitwise-identical ensemble.
Ensemble make_ensemble(const InitSpec& init, std::size_t n_particles, std::size_t dim,
                       std::uint64_t seed);

}  // namespace cbo
