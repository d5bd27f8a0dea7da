#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cbo/batching.hpp"
#include "cbo/ensemble.hpp"
#include "cbo/objective.hpp"
#include "cbo/optimizer.hpp"
#include "cbo/params.hpp"

namespace cbo {

// ---------------------------------------------------------------- mini-batch SGD

struct SgdParams {
  double gamma = 0.01;
  /// Data batch size; clipped to the sample count.
  std::size_t batch = 1;
  std::size_t max_iters = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// x - (gamma/m) sum_{i in batch} grad l_i(x)
std::vector<double> sgd_step(std::span<const double> x, const Objective& obj,
                             const DataBatch& batch, double gamma);

struct SgdReport {
  std::vector<double> x;
  std::size_t iterations = 0;
  double final_loss = 0.0;
  double wall_ms = 0.0;
};

/// Called after each step with (steps done, current x); returning false stops.
using SgdObserver = std::function<bool(std::size_t, std::span<const double>)>;

/// Fixed-budget SGD from x0 with a fresh data batch per step.
SgdReport run_sgd(const Objective& obj, const SgdParams& params, std::vector<double> x0,
                  const SgdObserver& observer = {});

// ---------------------------------------------------------------- isotropic CBO

enum class Heaviside { off, logistic };

/// The earlier consensus model: one noise amplitude |X - x*| shared by all coordinates.
struct IsotropicCboParams {
  /// lambda, sigma, beta, gamma, batch sizes, stopping and schedules; `scheme` is ignored.
  CboParams base;
  Heaviside heaviside = Heaviside::off;
  /// Width of the logistic step H(s) = (1 + tanh(s / eps)) / 2.
  double heaviside_eps = 0.01;

  void validate() const;
};

/// X <- X - lambda*gamma*h*(X - x*) + sigma*sqrt(gamma)*|X - x*|*z, z a vector of standard normals.
void isotropic_move(std::span<double> x, std::span<const double> x_star, double lambda,
                    double sigma, double gamma, double h, std::span<const double> noise);

/// Isotropic update of `targets`. `obj` is needed only for the logistic Heaviside factor,
/// which compares L(X) with L(x*).
void isotropic_cbo_step(Ensemble& ensemble, std::span<const std::size_t> targets,
                        std::span<const double> x_star, const IsotropicCboParams& params,
                        double sigma, Rng& rng, const Objective* obj = nullptr);

RunReport run_isotropic_cbo(const Objective& obj, const IsotropicCboParams& params,
                            const InitSpec& init, std::uint64_t seed, RunHooks hooks = {});

}  // namespace cbo
