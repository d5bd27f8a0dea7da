#pragma once

#include <cstddef>
#include <span>

#include "cbo/ensemble.hpp"
#include "cbo/params.hpp"
#include "cbo/rng.hpp"

namespace cbo {

// Single-particle moves. `noise` holds one standard normal per coordinate, so
// tests can drive them with fixed draws.

/// X_i <- X_i - lambda*gamma*(X_i - x*_i) + sigma*sqrt(gamma)*(X_i - x*_i)*z_i
void euler_move(std::span<double> x, std::span<const double> x_star, double lambda, double sigma,
                double gamma, std::span<const double> noise);

/// Exact drift flow towards x* over gamma, then multiplicative noise on the contracted offset.
void splitting_move(std::span<double> x, std::span<const double> x_star, double lambda,
                    double sigma, double gamma, std::span<const double> noise);

/// Exact solution of the component-wise geometric Brownian motion with x* frozen:
/// X_i <- x*_i + (X_i - x*_i) exp((-lambda - sigma^2/2) gamma + sigma sqrt(gamma) w_i)
void exact_gbm_move(std::span<double> x, std::span<const double> x_star, double lambda,
                    double sigma, double gamma, std::span<const double> noise);

// Ensemble updates. Each targeted particle j draws its noise from rng.split-style
// stream (key, j) where key is one draw from `rng`, so the result does not depend
// on the order in which particles are processed.

void euler_update(Ensemble& ensemble, std::span<const std::size_t> targets,
                  std::span<const double> x_star, double lambda, double sigma, double gamma,
                  Rng& rng);
void splitting_update(Ensemble& ensemble, std::span<const std::size_t> targets,
                      std::span<const double> x_star, double lambda, double sigma, double gamma,
                      Rng& rng);
void exact_gbm_update(Ensemble& ensemble, std::span<const std::size_t> targets,
                      std::span<const double> x_star, double lambda, double sigma, double gamma,
                      Rng& rng);

void apply_scheme(Scheme scheme, Ensemble& ensemble, std::span<const std::size_t> targets,
                  std::span<const double> x_star, double lambda, double sigma, double gamma,
                  Rng& rng);

/// (1/d) |next - prev|^2 <= epsilon
bool check_stop(std::span<const double> prev, std::span<const double> next, double epsilon);

/// Adds N(0, kick_sigma^2) to every coordinate of every particle and bumps `restarts`.
/// Returns false without touching the ensemble when max_restarts is already reached.
bool stall_kick(Ensemble& ensemble, const StallConfig& config, std::size_t& restarts, Rng& rng);

}  // namespace cbo
