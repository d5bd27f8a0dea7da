#include "cbo/schemes.hpp"

#include <cmath>
#include <vector>

#include "cbo/errors.hpp"

namespace cbo {

namespace {

void check_step(std::span<const double> x, std::span<const double> x_star, double gamma) {
  if (x.size() != x_star.size()) throw InputError("consensus dimension mismatch");
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
}

template <class Move>
void update_each(Ensemble& ens, std::span<const std::size_t> targets,
                 std::span<const double> x_star, Rng& rng, Move move) {
  if (x_star.size() != ens.dim()) throw InputError("consensus dimension mismatch");
  for (double v : x_star)
    if (!std::isfinite(v)) throw InputError("non-finite consensus point");
  const std::uint64_t key = rng();
  std::vector<double> noise(ens.dim());
  for (std::size_t j : targets) {
    if (j >= ens.size()) throw InputError("target particle index out of range");
    Rng stream(key, j);
    for (double& z : noise) z = stream.normal();
    move(ens.particle(j), noise);
  }
}

}  // namespace

void euler_move(std::span<double> x, std::span<const double> x_star, double lambda, double sigma,
                double gamma, std::span<const double> noise) {
  check_step(x, x_star, gamma);
  const double drift = lambda * gamma;
  const double diffusion = sigma * std::sqrt(gamma);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] - x_star[i];
    x[i] += -drift * r + diffusion * r * noise[i];
  }
}

void splitting_move(std::span<double> x, std::span<const double> x_star, double lambda,
                    double sigma, double gamma, std::span<const double> noise) {
  check_step(x, x_star, gamma);
  const double decay = std::exp(-lambda * gamma);
  const double diffusion = sigma * std::sqrt(gamma);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (x[i] - x_star[i]) * decay;
    x[i] = x_star[i] + r + diffusion * r * noise[i];
  }
}

void exact_gbm_move(std::span<double> x, std::span<const double> x_star, double lambda,
                    double sigma, double gamma, std::span<const double> noise) {
  check_step(x, x_star, gamma);
  const double drift = (-lambda - 0.5 * sigma * sigma) * gamma;
  const double diffusion = sigma * std::sqrt(gamma);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = x_star[i] + (x[i] - x_star[i]) * std::exp(drift + diffusion * noise[i]);
}

void euler_update(Ensemble& ensemble, std::span<const std::size_t> targets,
                  std::span<const double> x_star, double lambda, double sigma, double gamma,
                  Rng& rng) {
  update_each(ensemble, targets, x_star, rng, [&](std::span<double> x, std::span<const double> z) {
    euler_move(x, x_star, lambda, sigma, gamma, z);
  });
}

void splitting_update(Ensemble& ensemble, std::span<const std::size_t> targets,
                      std::span<const double> x_star, double lambda, double sigma, double gamma,
                      Rng& rng) {
  update_each(ensemble, targets, x_star, rng, [&](std::span<double> x, std::span<const double> z) {
    splitting_move(x, x_star, lambda, sigma, gamma, z);
  });
}

void exact_gbm_update(Ensemble& ensemble, std::span<const std::size_t> targets,
                      std::span<const double> x_star, double lambda, double sigma, double gamma,
                      Rng& rng) {
  update_each(ensemble, targets, x_star, rng, [&](std::span<double> x, std::span<const double> z) {
    exact_gbm_move(x, x_star, lambda, sigma, gamma, z);
  });
}

void apply_scheme(Scheme scheme, Ensemble& ensemble, std::span<const std::size_t> targets,
                  std::span<const double> x_star, double lambda, double sigma, double gamma,
                  Rng& rng) {
  switch (scheme) {
    case Scheme::euler:
      return euler_update(ensemble, targets, x_star, lambda, sigma, gamma, rng);
    case Scheme::splitting:
      return splitting_update(ensemble, targets, x_star, lambda, sigma, gamma, rng);
    case Scheme::exact_gbm:
      return exact_gbm_update(ensemble, targets, x_star, lambda, sigma, gamma, rng);
  }
}

bool check_stop(std::span<const double> prev, std::span<const double> next, double epsilon) {
  if (prev.size() != next.size() || prev.empty())
    throw InputError("consensus points differ in dimension");
  double acc = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double r = next[i] - prev[i];
    acc += r * r;
  }
  // Inclusive boundary; the slack absorbs rounding in the squared differences.
  return acc <= epsilon * static_cast<double>(prev.size()) * (1.0 + 1e-12);
}

bool stall_kick(Ensemble& ensemble, const StallConfig& config, std::size_t& restarts, Rng& rng) {
  if (restarts >= config.max_restarts) return false;
  ++restarts;
  if (config.kick_sigma == 0.0) return true;
  const std::uint64_t key = rng();
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    Rng stream(key, j);
    for (double& v : ensemble.particle(j)) v += config.kick_sigma * stream.normal();
  }
  return true;
}

}  // namespace cbo
