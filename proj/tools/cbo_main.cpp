#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cbo/errors.hpp"
#include "cbo/harness/config.hpp"
#include "cbo/harness/experiments.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Overrides {
  std::string out;
  std::size_t threads = 0;
  bool no_timing = false;
};

cbo::harness::ExperimentConfig load(const std::string& path, const Overrides& o) {
  auto cfg = cbo::harness::load_config(path);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.threads) cfg.threads = o.threads;
  if (o.no_timing) cfg.record_timing = false;
  cfg.validate();
  return cfg;
}

int cmd_run(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto table = cbo::harness::run_success_experiment(cfg);
  std::printf("%-16s %5s %9s %13s %11s %11s\n", "method", "runs", "success", "mean_dist",
              "mean_iters", "mean_ms");
  for (const auto& r : table.rows)
    std::printf("%-16s %5zu %9.3f %13.6g %11.1f %11.1f\n", r.method.c_str(), r.repetitions,
                r.success_rate, r.mean_distance, r.mean_iterations, r.mean_wall_ms);
  std::printf("wrote %s\n", cfg.output_dir.string().c_str());
  return 0;
}

int cmd_train(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  for (const auto& res : cbo::harness::run_training_experiment(cfg)) {
    std::printf("%s (data: %s, stop: %s)\n", res.method.c_str(), res.data_source.c_str(),
                res.stop_reason.c_str());
    for (const auto& e : res.epochs)
      std::printf("  epoch %3zu  acc %.4f  loss %.5f  %9.1f ms\n", e.epoch, e.test_accuracy,
                  e.train_loss_estimate, e.wall_ms);
  }
  std::printf("wrote %s\n", cfg.output_dir.string().c_str());
  return 0;
}

int cmd_diag(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto rep = cbo::harness::run_diagnostics(cfg);
  for (const auto& [a, fit] : rep.anchored)
    std::printf("anchored %-20s d=%zu slope %.6g +- %.2g expected %.6g\n", cbo::to_string(a.scheme),
                a.dim, fit.slope, fit.std_error, fit.expected);
  if (const auto& c = rep.certificate)
    std::printf("certificate mu %.6g (%s) nu %s (%s)\n", c->mu, c->mu_positive ? "> 0" : "<= 0",
                c->nu_defined ? std::to_string(c->nu).c_str() : "undefined",
                c->nu_ok ? "<= 3/4" : "fails");
  for (const auto& g : rep.laplace) std::printf("laplace beta %-8g gap %.6g\n", g.beta, g.gap);
  if (const auto& t = rep.semidiscrete)
    std::printf("semidiscrete %zu records, final variance %.6g\n", t->times.size(),
                t->variance.empty() ? 0.0 : t->variance.back());
  if (rep.anchored.empty() && !rep.certificate && rep.laplace.empty() && !rep.semidiscrete)
    std::printf("no diagnostics listed in the config\n");
  std::printf("wrote %s\n", cfg.output_dir.string().c_str());
  return 0;
}

int cmd_validate(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  std::cout << cbo::harness::describe_config(cfg) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mini-batch consensus-based optimization experiments"};
  app.require_subcommand(1);
  std::string config;
  Overrides o;
  int (*action)(const std::string&, const Overrides&) = nullptr;

  auto add = [&](const char* name, const char* help, int (*fn)(const std::string&, const Overrides&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "experiment config (JSON, comments allowed)")->required();
    sub->add_option("--out", o.out, "override output_dir");
    sub->add_option("--threads", o.threads, "override worker count");
    sub->add_flag("--no-timing", o.no_timing, "write 0 for wall-clock columns");
    sub->callback([&action, fn] { action = fn; });
  };
  add("run", "success-rate experiment", cmd_run);
  add("train", "classifier training experiment", cmd_train);
  add("diag", "mean-field diagnostics", cmd_diag);
  add("validate", "check a config and print it with defaults filled in", cmd_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    return action(config, o);
  } catch (const cbo::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
}
