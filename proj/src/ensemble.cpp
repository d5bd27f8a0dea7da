#include "cbo/ensemble.hpp"

#include <cmath>

#include "cbo/errors.hpp"

namespace cbo {

namespace {
constexpr std::uint64_t kInitStream = 0x1417;
}

Ensemble::Ensemble(std::size_t n_particles, std::size_t dim, std::uint64_t seed)
    : n_(n_particles), d_(dim), seed_(seed), x_(n_particles * dim, 0.0), rng_(seed) {
  if (n_ == 0 || d_ == 0) throw DomainError("ensemble needs at least one particle and one dimension");
}

Ensemble::Ensemble(std::vector<double> positions, std::size_t dim, std::uint64_t seed)
    : n_(dim == 0 ? 0 : positions.size() / dim), d_(dim), seed_(seed), x_(std::move(positions)),
      rng_(seed) {
  if (d_ == 0 || n_ == 0 || x_.size() != n_ * d_)
    throw InputError("explicit positions do not form a nonempty N x d array");
  if (!all_finite()) throw InputError("explicit positions contain non-finite entries");
}

bool Ensemble::all_finite() const {
  for (double v : x_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> Ensemble::mean() const {
  std::vector<double> m(d_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    auto row = particle(j);
    for (std::size_t i = 0; i < d_; ++i) m[i] += row[i];
  }
  for (double& v : m) v /= static_cast<double>(n_);
  return m;
}

double Ensemble::variance() const { return second_moment_about(mean()); }

double Ensemble::second_moment_about(std::span<const double> a) const {
  if (a.size() != d_) throw InputError("anchor dimension mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    auto row = particle(j);
    for (std::size_t i = 0; i < d_; ++i) {
      const double r = row[i] - a[i];
      acc += r * r;
    }
  }
  return acc / static_cast<double>(n_);
}

InitSpec InitSpec::uniform(double low, double high) {
  InitSpec s;
  s.kind = Kind::uniform;
  s.low = low;
  s.high = high;
  return s;
}

InitSpec InitSpec::gaussian(double mean, double stddev) {
  InitSpec s;
  s.kind = Kind::gaussian;
  s.mean = mean;
  s.stddev = stddev;
  return s;
}

InitSpec InitSpec::explicit_rows(std::vector<double> positions) {
  InitSpec s;
  s.kind = Kind::explicit_positions;
  s.positions = std::move(positions);
  return s;
}

Ensemble make_ensemble(const InitSpec& init, std::size_t n_particles, std::size_t dim,
                       std::uint64_t seed) {
  if (init.kind == InitSpec::Kind::explicit_positions) {
    if (init.positions.size() != n_particles * dim)
      throw InputError("explicit positions have " + std::to_string(init.positions.size()) +
                       " entries, expected " + std::to_string(n_particles * dim));
    return Ensemble(init.positions, dim, seed);
  }

  Ensemble ens(n_particles, dim, seed);
  Rng draw = Rng(seed).split(kInitStream);
  auto x = ens.positions();
  switch (init.kind) {
    case InitSpec::Kind::uniform:
      if (!(init.low < init.high)) throw ConfigError("uniform init needs low < high");
      for (double& v : x) v = draw.uniform(init.low, init.high);
      break;
    case InitSpec::Kind::gaussian:
      if (!(init.stddev >= 0.0)) throw ConfigError("gaussian init needs stddev >= 0");
      for (double& v : x) v = init.mean + init.stddev * draw.normal();
      break;
    case InitSpec::Kind::explicit_positions:
      break;
  }
  return ens;
}

}  // namespace cbo
