#include "cbo/diagnostics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "cbo/baselines.hpp"
#include "cbo/consensus.hpp"
#include "cbo/errors.hpp"
#include "cbo/schemes.hpp"

namespace cbo {

const char* to_string(AnchoredScheme s) {
  switch (s) {
    case AnchoredScheme::componentwise_euler: return "componentwise_euler";
    case AnchoredScheme::splitting: return "splitting";
    case AnchoredScheme::exact_gbm: return "exact_gbm";
    case AnchoredScheme::isotropic_euler: return "isotropic_euler";
  }
  return "?";
}

namespace {

std::vector<double> all_losses(const Ensemble& ens, const Objective& obj) {
  std::vector<double> losses(ens.size());
  for (std::size_t j = 0; j < ens.size(); ++j) {
    losses[j] = obj.eval(ens.particle(j));
    if (!std::isfinite(losses[j])) throw NonFiniteLossError(j, 0, losses[j]);
  }
  return losses;
}

}  // namespace

ConvergenceCertificate compute_certificate(const Ensemble& ensemble, const Objective& obj,
                                           const CboParams& params, double loss_min,
                                           double curvature) {
  if (!(curvature > 0.0)) throw DomainError("curvature bound c_L must be positive");
  const auto losses = all_losses(ensemble, obj);
  for (double l : losses)
    if (l < loss_min)
      throw DomainError("loss_min " + std::to_string(loss_min) + " exceeds a sampled loss " +
                        std::to_string(l));

  ConvergenceCertificate c;
  c.lambda = params.lambda;
  c.sigma = params.sigma;
  c.beta = params.beta;
  c.loss_min = loss_min;
  c.curvature = curvature;
  c.variance0 = ensemble.variance();
  c.log_weight0 = log_mean_weight(losses, params.beta);

  const double s2 = params.sigma * params.sigma;
  // log( exp(-beta L_m) / M_L(0) ) >= 0
  const double log_ratio = -params.beta * loss_min - c.log_weight0;
  c.mu = 2.0 * params.lambda - 0.5 * s2 - s2 * std::exp(log_ratio);
  c.mu_positive = c.mu > 0.0;
  if (c.mu_positive) {
    c.nu_defined = true;
    if (c.variance0 == 0.0) {
      c.nu = 0.0;
    } else {
      const double log_nu = std::log(2.0 * c.variance0 * params.beta * curvature *
                                     (2.0 * params.lambda + s2) / c.mu) +
                            2.0 * log_ratio;
      c.nu = std::exp(log_nu);
    }
    c.nu_ok = c.nu <= 0.75;
  }
  return c;
}

double anchored_expected_slope(AnchoredScheme scheme, double lambda, double sigma,
                               std::size_t dim, double gamma) {
  const double s2g = sigma * sigma * gamma;
  const double a = 1.0 - lambda * gamma;
  switch (scheme) {
    case AnchoredScheme::componentwise_euler:
      return std::log(a * a + s2g);
    case AnchoredScheme::splitting:
      return -2.0 * lambda * gamma + std::log1p(s2g);
    case AnchoredScheme::exact_gbm:
      return (-2.0 * lambda + sigma * sigma) * gamma;
    case AnchoredScheme::isotropic_euler:
      return std::log(a * a + static_cast<double>(dim) * s2g);
  }
  return 0.0;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

AnchoredFit anchored_decay_experiment(AnchoredScheme scheme, double lambda, double sigma,
                                      std::size_t dim, std::size_t n_particles,
                                      std::size_t n_steps, double gamma, std::uint64_t seed) {
  constexpr std::size_t kGroups = 10;
  if (n_particles < 1000) throw DomainError("anchored experiment needs at least 1000 particles");
  if (n_steps < 5) throw DomainError("anchored experiment needs at least 5 steps");
  if (dim == 0) throw DomainError("dimension must be positive");

  Ensemble ens = make_ensemble(InitSpec::gaussian(0.0, 1.0), n_particles, dim, seed);
  const std::vector<double> anchor(dim, 0.0);
  std::vector<std::size_t> everyone(n_particles);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});

  IsotropicCboParams iso;
  iso.base.lambda = lambda;
  iso.base.gamma = gamma;

  const std::size_t group_size = n_particles / kGroups;
  std::vector<std::vector<double>> group_logs(kGroups);
  AnchoredFit fit;

  auto record = [&] {
    double total = 0.0;
    for (std::size_t g = 0; g < kGroups; ++g) {
      double acc = 0.0;
      for (std::size_t j = g * group_size; j < (g + 1) * group_size; ++j)
        for (double v : ens.particle(j)) acc += v * v;
      total += acc;
      group_logs[g].push_back(std::log(acc / static_cast<double>(group_size)));
    }
    for (std::size_t j = kGroups * group_size; j < n_particles; ++j)
      for (double v : ens.particle(j)) total += v * v;
    if (!(total > 0.0)) throw DomainError("ensemble collapsed onto the anchor");
    fit.log_moments.push_back(std::log(total / static_cast<double>(n_particles)));
  };

  record();
  Rng& rng = ens.rng();
  for (std::size_t step = 0; step < n_steps; ++step) {
    switch (scheme) {
      case AnchoredScheme::componentwise_euler:
        euler_update(ens, everyone, anchor, lambda, sigma, gamma, rng);
        break;
      case AnchoredScheme::splitting:
        splitting_update(ens, everyone, anchor, lambda, sigma, gamma, rng);
        break;
      case AnchoredScheme::exact_gbm:
        exact_gbm_update(ens, everyone, anchor, lambda, sigma, gamma, rng);
        break;
      case AnchoredScheme::isotropic_euler:
        isotropic_cbo_step(ens, everyone, anchor, iso, sigma, rng);
        break;
    }
    record();
  }

  const std::size_t start = n_steps / 5;
  std::vector<double> steps;
  for (std::size_t s = start; s <= n_steps; ++s) steps.push_back(static_cast<double>(s));
  auto tail = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(start), v.end());
  };

  fit.slope = ols_slope(steps, tail(fit.log_moments));
  std::vector<double> slopes;
  for (const auto& g : group_logs) slopes.push_back(ols_slope(steps, tail(g)));
  const double mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / kGroups;
  double ss = 0.0;
  for (double s : slopes) ss += (s - mean) * (s - mean);
  fit.std_error = std::sqrt(ss / (kGroups - 1)) / std::sqrt(static_cast<double>(kGroups));
  fit.expected = anchored_expected_slope(scheme, lambda, sigma, dim, gamma);
  return fit;
}

SemidiscreteResult semidiscrete_trace(const Objective& obj, const CboParams& params,
                                      std::size_t refresh_every, const InitSpec& init,
                                      std::uint64_t seed) {
  if (refresh_every == 0) throw ConfigError("refresh_every must be at least 1");
  SemidiscreteResult out;
  auto sample = [&](const Ensemble& ens, double time, double beta,
                    std::span<const double> consensus) {
    out.trace.times.push_back(time);
    out.trace.variance.push_back(ens.variance());
    out.trace.log_weight.push_back(log_mean_weight(all_losses(ens, obj), beta));
    out.trace.consensus.emplace_back(consensus.begin(), consensus.end());
  };

  Ensemble ens = make_ensemble(init, params.n_particles, obj.dim(), seed);
  {
    std::vector<std::size_t> everyone(ens.size());
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    const auto x0 = weighted_consensus(ens, everyone, all_losses(ens, obj), params.beta);
    sample(ens, 0.0, params.beta, x0.x_star);
  }

  RunHooks hooks;
  hooks.refresh_every = refresh_every;
  hooks.on_batch = [&](const BatchEvent& ev) {
    if (ev.batch_step % refresh_every == 0)
      sample(ev.ensemble, static_cast<double>(ev.batch_step) * params.gamma, ev.beta, ev.x_star);
    return true;
  };
  out.report = run_optimizer(obj, params, std::move(ens), hooks);
  return out;
}

std::vector<LaplaceGap> laplace_gap_experiment(const Objective& obj, const InitSpec& sampler,
                                               std::size_t n_samples,
                                               const std::vector<double>& betas,
                                               std::uint64_t seed) {
  const auto known = obj.known_min();
  if (!known) throw UnsupportedError(obj.name() + " has no known minimum");
  if (n_samples == 0) throw DomainError("laplace experiment needs samples");
  const Ensemble pts = make_ensemble(sampler, n_samples, obj.dim(), seed);
  const auto losses = all_losses(pts, obj);
  std::vector<LaplaceGap> out;
  for (double beta : betas) out.push_back({beta, laplace_estimate(losses, beta) - known->value});
  return out;
}

}  // namespace cbo
