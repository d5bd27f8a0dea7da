#include "cbo/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cbo/errors.hpp"

namespace cbo {

void SgdParams::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("gamma: must be positive");
  if (batch == 0) throw ConfigError("batch: must be at least 1");
  if (max_iters == 0) throw ConfigError("max_iters: must be at least 1");
}

std::vector<double> sgd_step(std::span<const double> x, const Objective& obj,
                             const DataBatch& batch, double gamma) {
  if (!obj.has_gradient()) throw UnsupportedError(obj.name() + " provides no gradients");
  if (batch.indices.empty()) throw DomainError("empty data batch");
  if (x.size() != obj.dim()) throw InputError("parameter dimension mismatch");
  std::vector<double> g(x.size()), acc(x.size(), 0.0);
  for (std::size_t i : batch.indices) {
    obj.grad_sample(x, i, g);
    for (std::size_t k = 0; k < x.size(); ++k) acc[k] += g[k];
  }
  const double scale = gamma / static_cast<double>(batch.indices.size());
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] -= scale * acc[k];
  return out;
}

SgdReport run_sgd(const Objective& obj, const SgdParams& params, std::vector<double> x0,
                  const SgdObserver& observer) {
  params.validate();
  if (!obj.has_gradient()) throw UnsupportedError(obj.name() + " provides no gradients");
  if (obj.n_samples() == 0) throw UnsupportedError(obj.name() + " is not a finite-sum objective");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = obj.n_samples();
  const std::size_t m = std::min(params.batch, n);
  Rng rng(params.seed);

  SgdReport report;
  report.x = std::move(x0);
  for (std::size_t k = 0; k < params.max_iters; ++k) {
    report.x = sgd_step(report.x, obj, sample_data_batch(n, m, rng), params.gamma);
    report.iterations = k + 1;
    if (observer && !observer(report.iterations, report.x)) break;
  }
  report.final_loss = obj.eval(report.x);
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

void IsotropicCboParams::validate() const {
  base.validate();
  if (heaviside == Heaviside::logistic && !(heaviside_eps > 0.0))
    throw ConfigError("heaviside_eps: must be positive");
}

void isotropic_move(std::span<double> x, std::span<const double> x_star, double lambda,
                    double sigma, double gamma, double h, std::span<const double> noise) {
  if (x.size() != x_star.size()) throw InputError("consensus dimension mismatch");
  double dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] - x_star[i];
    dist2 += r * r;
  }
  const double amp = sigma * std::sqrt(gamma) * std::sqrt(dist2);
  const double drift = lambda * gamma * h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] - x_star[i];
    x[i] += -drift * r + amp * noise[i];
  }
}

void isotropic_cbo_step(Ensemble& ensemble, std::span<const std::size_t> targets,
                        std::span<const double> x_star, const IsotropicCboParams& params,
                        double sigma, Rng& rng, const Objective* obj) {
  if (x_star.size() != ensemble.dim()) throw InputError("consensus dimension mismatch");
  const bool use_h = params.heaviside == Heaviside::logistic;
  if (use_h && obj == nullptr) throw InputError("logistic Heaviside needs the objective");
  const double l_star = use_h ? obj->eval(x_star) : 0.0;
  const std::uint64_t key = rng();
  std::vector<double> noise(ensemble.dim());
  for (std::size_t j : targets) {
    if (j >= ensemble.size()) throw InputError("target particle index out of range");
    auto x = ensemble.particle(j);
    double h = 1.0;
    if (use_h) h = 0.5 * (1.0 + std::tanh((obj->eval(x) - l_star) / params.heaviside_eps));
    Rng stream(key, j);
    for (double& z : noise) z = stream.normal();
    isotropic_move(x, x_star, params.base.lambda, sigma, params.base.gamma, h, noise);
  }
}

RunReport run_isotropic_cbo(const Objective& obj, const IsotropicCboParams& params,
                            const InitSpec& init, std::uint64_t seed, RunHooks hooks) {
  params.validate();
  hooks.kernel = [&obj, params](Ensemble& ens, std::span<const std::size_t> targets,
                                std::span<const double> x_star, double, double sigma, double,
                                Rng& rng) {
    isotropic_cbo_step(ens, targets, x_star, params, sigma, rng, &obj);
  };
  return run_optimizer(obj, params.base, init, seed, hooks);
}

}  // namespace cbo
