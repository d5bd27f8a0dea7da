#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cbo/ensemble.hpp"
#include "cbo/objective.hpp"
#include "cbo/optimizer.hpp"
#include "cbo/params.hpp"

namespace cbo {

/// Moments of the particle cloud at a sequence of times.
struct MomentTrace {
  std::vector<double> times;
  /// V(t) = E|X - E X|^2
  std::vector<double> variance;
  /// log M_L(t) = log E exp(-beta L(X))
  std::vector<double> log_weight;
  std::vector<std::vector<double>> consensus;
};

/// Sufficient condition for exponential variance decay of the mean-field dynamics:
///   mu = 2 lambda - sigma^2/2 - sigma^2 exp(-beta L_m) / M_L(0) > 0
///   nu = 2 V(0) beta c_L (2 lambda + sigma^2) exp(-2 beta L_m) / (mu M_L(0)^2) <= 3/4
struct ConvergenceCertificate {
  double mu = 0.0;
  /// Meaningful only when nu_defined (mu > 0).
  double nu = 0.0;
  bool mu_positive = false;
  bool nu_defined = false;
  bool nu_ok = false;

  double variance0 = 0.0;
  double log_weight0 = 0.0;
  double loss_min = 0.0;
  double curvature = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
};

/// Evaluates the certificate on the empirical law of `ensemble`, with lambda, sigma and beta
/// taken from `params`. `loss_min` must not exceed any sampled loss; `curvature` is c_L > 0.
ConvergenceCertificate compute_certificate(const Ensemble& ensemble, const Objective& obj,
                                           const CboParams& params, double loss_min,
                                           double curvature);

enum class AnchoredScheme { componentwise_euler, splitting, exact_gbm, isotropic_euler };

const char* to_string(AnchoredScheme s);

struct AnchoredFit {
  /// Least-squares slope of log E|X - a|^2 per step over the last 80% of steps.
  double slope = 0.0;
  /// Spread of the slope across ten disjoint particle groups, divided by sqrt(10).
  double std_error = 0.0;
  /// Closed-form per-step log multiplier of the second moment.
  double expected = 0.0;
  /// log E|X - a|^2 at steps 0..n_steps.
  std::vector<double> log_moments;
};

/// Closed-form per-step log multiplier of E|X - a|^2 with x* frozen at a.
double anchored_expected_slope(AnchoredScheme scheme, double lambda, double sigma,
                               std::size_t dim, double gamma);

/// Simulates `scheme` with x* frozen at the origin from N(0, I) initial data and fits
/// the growth rate of the second moment. Needs at least 1000 particles.
AnchoredFit anchored_decay_experiment(AnchoredScheme scheme, double lambda, double sigma,
                                      std::size_t dim, std::size_t n_particles,
                                      std::size_t n_steps, double gamma, std::uint64_t seed);

struct SemidiscreteResult {
  MomentTrace trace;
  RunReport report;
};

/// Runs the optimizer with x* recomputed only every `refresh_every` batch steps and
/// records V and log M_L at time 0 and just before every refresh.
SemidiscreteResult semidiscrete_trace(const Objective& obj, const CboParams& params,
                                      std::size_t refresh_every, const InitSpec& init,
                                      std::uint64_t seed);

struct LaplaceGap {
  double beta;
  /// laplace_estimate - L_m
  double gap;
};

/// Soft-min of `n_samples` points drawn from `sampler`, minus the known minimum, per beta.
std::vector<LaplaceGap> laplace_gap_experiment(const Objective& obj, const InitSpec& sampler,
                                               std::size_t n_samples,
                                               const std::vector<double>& betas,
                                               std::uint64_t seed);

/// Ordinary least squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cbo
