#include "cbo/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "cbo/consensus.hpp"
#include "cbo/errors.hpp"
#include "cbo/schemes.hpp"

namespace cbo {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::criterion_met: return "criterion_met";
    case StopReason::max_iters: return "max_iters";
    case StopReason::restarts_exhausted: return "restarts_exhausted";
    case StopReason::caller_stop: return "caller_stop";
  }
  return "?";
}

namespace {

// A carried index can reappear in the same batch; it is moved once.
std::vector<std::size_t> unique_targets(const std::vector<std::size_t>& batch,
                                        std::vector<char>& seen) {
  std::vector<std::size_t> out;
  out.reserve(batch.size());
  for (std::size_t j : batch)
    if (!seen[j]) {
      seen[j] = 1;
      out.push_back(j);
    }
  for (std::size_t j : out) seen[j] = 0;
  return out;
}

}  // namespace

RunReport run_optimizer(const Objective& obj, const CboParams& params, Ensemble ensemble,
                        const RunHooks& hooks) {
  params.validate();
  if (ensemble.size() != params.n_particles)
    throw ConfigError("n_particles: ensemble holds " + std::to_string(ensemble.size()) +
                      " particles");
  if (ensemble.dim() != obj.dim())
    throw ConfigError("objective dimension " + std::to_string(obj.dim()) +
                      " does not match ensemble dimension " + std::to_string(ensemble.dim()));
  if (hooks.refresh_every == 0) throw ConfigError("refresh_every must be at least 1");
  const std::size_t n_samples = obj.n_samples();
  if (params.batch_data) {
    if (n_samples == 0) throw UnsupportedError(obj.name() + " has no per-sample losses");
    if (*params.batch_data > n_samples)
      throw ConfigError("batch_data: " + std::to_string(*params.batch_data) +
                        " exceeds sample count " + std::to_string(n_samples));
  }

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = ensemble.size();
  Rng& rng = ensemble.rng();
  BatchPlan plan(n, params.batch_particles);

  std::vector<std::size_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), std::size_t{0});
  std::vector<char> seen(n, 0);

  RunReport report;
  report.seed = ensemble.seed();

  std::vector<double> x_star;
  std::vector<double> prev;
  std::vector<double> losses;
  bool have_prev = false;
  std::optional<DataBatch> data;
  std::optional<double> best_stall_loss;
  std::size_t flat_stalls = 0;
  std::size_t stalled = 0;
  std::size_t step = 0;
  std::size_t iteration = 0;
  std::size_t theta = 0;

  auto loss_at = [&](std::span<const double> x) {
    return data ? obj.eval_batch(x, data->indices) : obj.eval(x);
  };

  auto finish = [&](StopReason reason) {
    report.stop_reason = reason;
    report.final_consensus = x_star;
    report.batch_steps = step;
    if (report.consensus_trace.empty() || report.consensus_trace.back().iteration != iteration ||
        report.consensus_trace.back().theta != theta)
      report.consensus_trace.push_back({iteration, theta, x_star, loss_at(x_star)});
    report.final_loss = obj.eval(x_star);
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
  };

  for (iteration = 0; iteration < params.max_iters; ++iteration) {
    report.iterations_used = iteration + 1;
    const double sigma = params.sigma_at().at(iteration);
    const double beta = params.beta_at().at(iteration);
    const auto batches = next_particle_batches(plan, rng);

    for (theta = 0; theta < batches.size(); ++theta) {
      const auto& batch = batches[theta];
      const bool refresh = step % hooks.refresh_every == 0;

      if (refresh) {
        data.reset();
        if (params.batch_data) data = sample_data_batch(n_samples, *params.batch_data, rng);
        losses.resize(batch.size());
        for (std::size_t t = 0; t < batch.size(); ++t) {
          losses[t] = loss_at(ensemble.particle(batch[t]));
          if (!std::isfinite(losses[t])) throw NonFiniteLossError(batch[t], iteration, losses[t]);
        }
        x_star = params.consensus_mode == ConsensusMode::weighted
                     ? weighted_consensus(ensemble, batch, losses, beta).x_star
                     : argmin_consensus(ensemble, batch, losses).x_star;
      }

      const std::vector<std::size_t> targets =
          params.update_mode == UpdateMode::partial ? unique_targets(batch, seen) : everyone;
      if (hooks.kernel)
        hooks.kernel(ensemble, targets, x_star, params.lambda, sigma, params.gamma, rng);
      else
        apply_scheme(params.scheme, ensemble, targets, x_star, params.lambda, sigma, params.gamma,
                     rng);
      ++step;

      if (params.trace_every > 0 && step % params.trace_every == 0)
        report.consensus_trace.push_back({iteration, theta, x_star, loss_at(x_star)});

      if (hooks.on_batch &&
          !hooks.on_batch(BatchEvent{iteration, theta, step, x_star, refresh, sigma, beta, ensemble}))
        return finish(StopReason::caller_stop);

      if (!refresh) continue;
      if (have_prev) {
        if (params.stop_on_criterion && check_stop(prev, x_star, params.epsilon_stop))
          return finish(StopReason::criterion_met);

        if (params.stall.enabled) {
          stalled = check_stop(prev, x_star, params.stall.epsilon_stall) ? stalled + 1 : 0;
          if (stalled >= params.stall.consecutive) {
            stalled = 0;
            const double recorded = obj.eval(x_star);
            report.stall_losses.push_back(recorded);
            if (best_stall_loss &&
                !(recorded < *best_stall_loss -
                                 params.stall.min_rel_decrease * std::abs(*best_stall_loss))) {
              if (++flat_stalls >= params.stall.patience)
                return finish(StopReason::restarts_exhausted);
            } else {
              flat_stalls = 0;
              best_stall_loss = recorded;
            }
            if (!stall_kick(ensemble, params.stall, report.restarts, rng))
              return finish(StopReason::restarts_exhausted);
          }
        }
      }
      prev = x_star;
      have_prev = true;
    }
  }
  // Loop exit leaves iteration/theta one past the last step.
  iteration = params.max_iters - 1;
  theta = theta == 0 ? 0 : theta - 1;
  return finish(StopReason::max_iters);
}

RunReport run_optimizer(const Objective& obj, const CboParams& params, const InitSpec& init,
                        std::uint64_t seed, const RunHooks& hooks) {
  params.validate();
  return run_optimizer(obj, params, make_ensemble(init, params.n_particles, obj.dim(), seed),
                       hooks);
}

}  // namespace cbo
