#include "cbo/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "cbo/errors.hpp"
#include "cbo/harness/csv.hpp"
#include "cbo/objectives.hpp"

namespace cbo::harness {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> sgd_start(const InitSpec& init, std::size_t dim, std::uint64_t seed) {
  if (init.kind == InitSpec::Kind::explicit_positions) {
    if (init.positions.size() < dim) throw ConfigError("init.positions: shorter than one point");
    return {init.positions.begin(), init.positions.begin() + static_cast<std::ptrdiff_t>(dim)};
  }
  const Ensemble e = make_ensemble(init, 1, dim, seed);
  const auto row = e.particle(0);
  return {row.begin(), row.end()};
}

IsotropicCboParams isotropic_params(const MethodSpec& m) {
  return {m.cbo, m.heaviside, m.heaviside_eps};
}

struct Outcome {
  std::vector<double> x;
  std::size_t iterations = 0;
};

Outcome run_method(const Objective& obj, const MethodSpec& m, const InitSpec& init,
                   std::uint64_t seed) {
  switch (m.kind) {
    case MethodSpec::Kind::cbo: {
      auto rep = run_optimizer(obj, m.cbo, init, seed);
      return {std::move(rep.final_consensus), rep.iterations_used};
    }
    case MethodSpec::Kind::isotropic_cbo: {
      auto rep = run_isotropic_cbo(obj, isotropic_params(m), init, seed);
      return {std::move(rep.final_consensus), rep.iterations_used};
    }
    case MethodSpec::Kind::sgd: {
      SgdParams p = m.sgd;
      p.seed = seed;
      auto rep = run_sgd(obj, p, sgd_start(init, obj.dim(), seed));
      return {std::move(rep.x), rep.iterations};
    }
  }
  throw ConfigError("method type unsupported");
}

// Runs body(r) for r in [0, count) on up to `threads` workers; the first exception wins.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F body) {
  threads = std::clamp<std::size_t>(threads, 1, count);
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t r; (r = next++) < count;) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void write_config_copy(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  std::ofstream out(config.output_dir / "config.json");
  if (!out) throw FormatError("cannot write " + (config.output_dir / "config.json").string());
  out << describe_config(config) << '\n';
}

}  // namespace

SuccessTable run_success_experiment(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const auto obj = build_objective(config.objective);
  std::optional<KnownMinimum> target = obj->known_min();
  if (config.success_threshold && !target)
    throw ConfigError("success: objective " + obj->name() +
                      " has no known minimizer; disable the success criterion");

  SuccessTable table;
  for (const auto& method : config.methods) {
    std::vector<RunRecord> runs(config.repetitions);
    parallel_for(config.repetitions, config.threads, [&](std::size_t r) {
      RunRecord& rec = runs[r];
      rec.seed = config.seeds.for_repetition(r);
      const auto t0 = Clock::now();
      try {
        Outcome out = run_method(*obj, method, config.init, rec.seed);
        rec.final_x = std::move(out.x);
        rec.iterations = out.iterations;
      } catch (const NonFiniteLossError& e) {
        rec.diverged = true;
        rec.iterations = e.iteration;
      }
      rec.wall_ms = config.record_timing ? ms_since(t0) : 0.0;

      if (rec.diverged) {
        rec.final_distance = std::numeric_limits<double>::infinity();
      } else if (target) {
        double d2 = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < rec.final_x.size(); ++i) {
          const double diff = rec.final_x[i] - target->x[i];
          d2 += diff * diff;
          if (config.success_threshold) ok = ok && std::abs(diff) < *config.success_threshold;
        }
        rec.final_distance = std::sqrt(d2);
        rec.success = config.success_threshold && ok && std::isfinite(d2);
      } else {
        rec.final_distance = std::numeric_limits<double>::quiet_NaN();
      }
    });

    SuccessRow row;
    row.method = method.name;
    row.repetitions = config.repetitions;
    for (const auto& rec : runs) {
      row.success_rate += rec.success ? 1.0 : 0.0;
      row.mean_distance += rec.final_distance;
      row.mean_iterations += static_cast<double>(rec.iterations);
      row.mean_wall_ms += rec.wall_ms;
    }
    const double n = static_cast<double>(runs.size());
    row.success_rate /= n;
    row.mean_distance /= n;
    row.mean_iterations /= n;
    row.mean_wall_ms /= n;
    table.rows.push_back(row);
    table.runs.push_back(std::move(runs));
  }

  if (write_files) {
    write_config_copy(config);
    CsvTable summary{{"method", "repetitions", "success_rate", "mean_distance", "mean_iterations",
                      "mean_wall_ms"},
                     {}};
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      const auto& row = table.rows[k];
      summary.rows.push_back({row.method, std::to_string(row.repetitions),
                              format_double(row.success_rate), format_double(row.mean_distance),
                              format_double(row.mean_iterations), format_double(row.mean_wall_ms)});
      CsvTable runs{{"seed", "success", "final_distance", "iterations", "wall_ms"}, {}};
      for (const auto& rec : table.runs[k])
        runs.rows.push_back({std::to_string(rec.seed), rec.success ? "1" : "0",
                             format_double(rec.final_distance), std::to_string(rec.iterations),
                             format_double(rec.wall_ms)});
      write_csv(config.output_dir / ("runs_" + row.method + ".csv"), runs);
    }
    write_csv(config.output_dir / "summary.csv", summary);
  }
  return table;
}

std::vector<TrainingResult> run_training_experiment(const ExperimentConfig& config,
                                                    bool write_files) {
  config.validate();
  if (config.objective.kind != ObjectiveSpec::Kind::softmax_net)
    throw ConfigError("objective.type: training needs softmax_net");
  Dataset data;
  const auto obj = build_objective(config.objective, &data);
  const auto& net = static_cast<const SoftmaxNet&>(*obj);
  const std::size_t n = data.train->size();
  const std::size_t loss_n = std::min(config.training.loss_subset, n);
  const std::uint64_t seed = config.seeds.for_repetition(0);
  const std::size_t epochs = config.training.epochs;

  auto loss_estimate = [&](std::span<const double> x) {
    if (loss_n == 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < loss_n; ++i) s += net.eval_sample(x, i);
    return s / static_cast<double>(loss_n);
  };

  std::vector<TrainingResult> results;
  for (const auto& method : config.methods) {
    TrainingResult res;
    res.method = method.name;
    res.data_source = data.source;
    const auto t0 = Clock::now();
    auto record = [&](std::size_t epoch, std::span<const double> x) {
      res.epochs.push_back({epoch, test_accuracy(net, x, *data.test), loss_estimate(x),
                            config.record_timing ? ms_since(t0) : 0.0});
    };

    std::vector<double> last;
    if (method.kind == MethodSpec::Kind::sgd) {
      const std::size_t m = std::min(method.sgd.batch, n);
      const std::size_t per_epoch = (n + m - 1) / m;
      SgdParams p = method.sgd;
      p.seed = seed;
      p.max_iters = std::max<std::size_t>(1, epochs * per_epoch);
      auto x0 = sgd_start(config.init, obj->dim(), seed);
      record(0, x0);
      last = x0;
      if (epochs > 0) {
        auto rep = run_sgd(*obj, p, x0, [&](std::size_t steps, std::span<const double> x) {
          if (steps % per_epoch == 0) record(steps / per_epoch, x);
          return steps < epochs * per_epoch;
        });
        last = rep.x;
      }
      res.stop_reason = "max_iters";
    } else {
      const std::size_t m = std::min(method.cbo.batch_data.value_or(n), n);
      const std::size_t per_epoch = (n + m - 1) / m;
      const Ensemble start = make_ensemble(config.init, method.cbo.n_particles, obj->dim(), seed);
      // Before any consensus exists, the ensemble mean stands in for x*.
      record(0, start.mean());
      last = start.mean();
      if (epochs > 0) {
        RunHooks hooks;
        hooks.on_batch = [&](const BatchEvent& e) {
          if (e.batch_step % per_epoch == 0) record(e.batch_step / per_epoch, e.x_star);
          return e.batch_step < epochs * per_epoch;
        };
        RunReport rep;
        if (method.kind == MethodSpec::Kind::cbo) {
          rep = run_optimizer(*obj, method.cbo, start, hooks);
        } else {
          rep = run_isotropic_cbo(*obj, isotropic_params(method), config.init, seed, hooks);
        }
        last = rep.final_consensus;
        res.stop_reason = to_string(rep.stop_reason);
      } else {
        res.stop_reason = "caller_stop";
      }
    }
    // A run that ended early keeps its final point for the remaining epochs.
    while (res.epochs.size() < epochs + 1) record(res.epochs.size(), last);
    results.push_back(std::move(res));
  }

  if (write_files) {
    write_config_copy(config);
    for (const auto& res : results) {
      CsvTable t{{"epoch", "test_accuracy", "train_loss_estimate", "wall_ms"}, {}};
      for (const auto& row : res.epochs)
        t.rows.push_back({std::to_string(row.epoch), format_double(row.test_accuracy),
                          format_double(row.train_loss_estimate), format_double(row.wall_ms)});
      write_csv(config.output_dir / ("train_" + res.method + ".csv"), t);
    }
  }
  return results;
}

DiagnosticsReport run_diagnostics(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const auto& diag = config.diagnostics;
  const std::uint64_t seed = config.seeds.for_repetition(0);
  DiagnosticsReport report;

  for (std::size_t i = 0; i < diag.anchored.size(); ++i) {
    const auto& a = diag.anchored[i];
    report.anchored.emplace_back(a, anchored_decay_experiment(a.scheme, a.lambda, a.sigma, a.dim,
                                                              a.particles, a.steps, a.gamma,
                                                              config.seeds.for_repetition(i)));
  }

  const bool needs_objective = diag.certificate || diag.laplace || diag.semidiscrete;
  std::unique_ptr<Objective> obj;
  if (needs_objective) obj = build_objective(config.objective);
  const MethodSpec* cbo_method = nullptr;
  for (const auto& m : config.methods)
    if (m.kind != MethodSpec::Kind::sgd && !cbo_method) cbo_method = &m;
  if ((diag.certificate || diag.semidiscrete) && !cbo_method)
    throw ConfigError("methods: certificate and semidiscrete diagnostics need a cbo method");

  if (diag.certificate) {
    double c_l = 0.0;
    if (diag.certificate->curvature)
      c_l = *diag.certificate->curvature;
    else if (auto b = obj->curvature_bound())
      c_l = *b;
    else
      throw ConfigError("diagnostics.certificate.curvature: required for objective " + obj->name());
    const Ensemble ens = make_ensemble(config.init, cbo_method->cbo.n_particles, obj->dim(), seed);
    report.certificate =
        compute_certificate(ens, *obj, cbo_method->cbo, diag.certificate->loss_min, c_l);
  }
  if (diag.laplace)
    report.laplace =
        laplace_gap_experiment(*obj, config.init, diag.laplace->samples, diag.laplace->betas, seed);
  if (diag.semidiscrete)
    report.semidiscrete = semidiscrete_trace(*obj, cbo_method->cbo,
                                             diag.semidiscrete->refresh_every, config.init, seed)
                              .trace;

  if (write_files) {
    write_config_copy(config);
    if (!report.anchored.empty()) {
      CsvTable t{{"scheme", "lambda", "sigma", "gamma", "dim", "particles", "steps", "slope",
                  "std_error", "expected"},
                 {}};
      for (const auto& [a, fit] : report.anchored)
        t.rows.push_back({to_string(a.scheme), format_double(a.lambda), format_double(a.sigma),
                          format_double(a.gamma), std::to_string(a.dim),
                          std::to_string(a.particles), std::to_string(a.steps),
                          format_double(fit.slope), format_double(fit.std_error),
                          format_double(fit.expected)});
      write_csv(config.output_dir / "anchored.csv", t);
    }
    if (const auto& c = report.certificate) {
      CsvTable t{{"mu", "nu", "mu_positive", "nu_ok", "variance0", "log_weight0", "loss_min",
                  "curvature", "lambda", "sigma", "beta"},
                 {}};
      t.rows.push_back({format_double(c->mu),
                        c->nu_defined ? format_double(c->nu) : "nan",
                        c->mu_positive ? "1" : "0", c->nu_ok ? "1" : "0",
                        format_double(c->variance0), format_double(c->log_weight0),
                        format_double(c->loss_min), format_double(c->curvature),
                        format_double(c->lambda), format_double(c->sigma), format_double(c->beta)});
      write_csv(config.output_dir / "certificate.csv", t);
    }
    if (!report.laplace.empty()) {
      CsvTable t{{"beta", "gap"}, {}};
      for (const auto& g : report.laplace)
        t.rows.push_back({format_double(g.beta), format_double(g.gap)});
      write_csv(config.output_dir / "laplace.csv", t);
    }
    if (const auto& tr = report.semidiscrete) {
      CsvTable t{{"time", "variance", "log_weight"}, {}};
      for (std::size_t k = 0; k < tr->times.size(); ++k)
        t.rows.push_back({format_double(tr->times[k]), format_double(tr->variance[k]),
                          format_double(tr->log_weight[k])});
      write_csv(config.output_dir / "semidiscrete.csv", t);
    }
  }
  return report;
}

}  // namespace cbo::harness
