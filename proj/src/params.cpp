#include "cbo/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbo/errors.hpp"

namespace cbo {

double Schedule::at(std::size_t k) const {
  switch (kind) {
    case Kind::constant:
      return base;
    case Kind::log_decay:
      return base / std::log(static_cast<double>(k) + 2.0);
    case Kind::geometric: {
      const double v = base * std::pow(rate, static_cast<double>(k));
      return std::clamp(v, std::min(base, std::numeric_limits<double>::min()), cap);
    }
  }
  return base;
}

namespace {
void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(std::string(field) + ": " + what);
}
}  // namespace

void CboParams::validate() const {
  require(lambda > 0.0 && std::isfinite(lambda), "lambda", "must be positive");
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma", "must be non-negative");
  require(beta > 0.0 && std::isfinite(beta), "beta", "must be positive");
  require(gamma > 0.0 && std::isfinite(gamma), "gamma", "must be positive");
  require(n_particles >= 1, "n_particles", "must be at least 1");
  require(batch_particles >= 1, "batch_particles", "must be at least 1");
  require(batch_particles <= n_particles, "batch_particles", "must not exceed n_particles");
  require(!batch_data || *batch_data >= 1, "batch_data", "must be at least 1");
  require(epsilon_stop > 0.0, "epsilon_stop", "must be positive");
  require(max_iters >= 1, "max_iters", "must be at least 1");
  require(sigma_schedule != Schedule::Kind::geometric || sigma_rate > 0.0, "sigma_rate",
          "must be positive");
  require(beta_schedule != Schedule::Kind::geometric || beta_rate > 0.0, "beta_rate",
          "must be positive");
  require(beta_schedule != Schedule::Kind::log_decay, "beta_schedule",
          "log_decay would lower beta over time; use constant or geometric");
  require(beta_max > 0.0, "beta_max", "must be positive");
  if (stall.enabled) {
    require(stall.epsilon_stall > 0.0, "epsilon_stall", "must be positive");
    require(stall.kick_sigma >= 0.0, "kick_sigma", "must be non-negative");
    require(stall.consecutive >= 1, "stall_consecutive", "must be at least 1");
    require(stall.patience >= 1, "stall_patience", "must be at least 1");
  }
}

const char* to_string(UpdateMode m) { return m == UpdateMode::partial ? "partial" : "full"; }

const char* to_string(ConsensusMode m) {
  return m == ConsensusMode::weighted ? "weighted" : "argmin";
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::splitting: return "splitting";
    case Scheme::exact_gbm: return "exact_gbm";
  }
  return "?";
}

const char* to_string(Schedule::Kind k) {
  switch (k) {
    case Schedule::Kind::constant: return "constant";
    case Schedule::Kind::log_decay: return "log_decay";
    case Schedule::Kind::geometric: return "geometric";
  }
  return "?";
}

}  // namespace cbo
