#include "cbo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cbo/errors.hpp"
#include "cbo/rng.hpp"

namespace cbo {

namespace {
constexpr double kPi = std::numbers::pi;

void check_dim(std::span<const double> x, std::size_t d) {
  if (x.size() != d)
    throw InputError("expected a " + std::to_string(d) + "-vector, got " +
                     std::to_string(x.size()));
}
}  // namespace

// ---------------------------------------------------------------- Rastrigin

Rastrigin::Rastrigin(std::size_t dim, double shift, double lift)
    : d_(dim), shift_(shift), lift_(lift) {
  if (d_ == 0) throw ConfigError("rastrigin dimension must be at least 1");
}

double Rastrigin::eval(std::span<const double> x) const {
  check_dim(x, d_);
  double acc = 0.0;
  for (double v : x) {
    const double r = v - shift_;
    acc += r * r - 10.0 * std::cos(2.0 * kPi * r) + 10.0;
  }
  return acc / static_cast<double>(d_) + lift_;
}

std::optional<KnownMinimum> Rastrigin::known_min() const {
  return KnownMinimum{std::vector<double>(d_, shift_), lift_};
}

std::optional<double> Rastrigin::curvature_bound() const {
  return (2.0 + 40.0 * kPi * kPi) / static_cast<double>(d_);
}

// ---------------------------------------------------------------- Oscillatory

Oscillatory::Oscillatory(std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw ConfigError("oscillatory objective needs at least one sample");
  Rng rng(seed);
  const double sd = std::sqrt(0.1);
  offsets_.resize(n_samples);
  for (double& s : offsets_) s = sd * rng.normal();
}

Oscillatory::Oscillatory(std::vector<double> offsets) : offsets_(std::move(offsets)) {
  if (offsets_.empty()) throw ConfigError("oscillatory objective needs at least one sample");
}

double Oscillatory::sample_loss(double x, double offset) {
  const double r = x - offset - kPi / 2.0;
  return std::exp(std::sin(2.0 * x * x)) + 0.1 * r * r;
}

double Oscillatory::sample_grad(double x, double offset) {
  const double r = x - offset - kPi / 2.0;
  return 4.0 * x * std::cos(2.0 * x * x) * std::exp(std::sin(2.0 * x * x)) + 0.2 * r;
}

double Oscillatory::eval(std::span<const double> x) const {
  check_dim(x, 1);
  double acc = 0.0;
  for (double s : offsets_) {
    const double r = x[0] - s - kPi / 2.0;
    acc += r * r;
  }
  return std::exp(std::sin(2.0 * x[0] * x[0])) + 0.1 * acc / static_cast<double>(offsets_.size());
}

double Oscillatory::eval_sample(std::span<const double> x, std::size_t i) const {
  check_dim(x, 1);
  return sample_loss(x[0], offsets_.at(i));
}

double Oscillatory::eval_batch(std::span<const double> x,
                               std::span<const std::size_t> indices) const {
  check_dim(x, 1);
  if (indices.empty()) throw DomainError("empty data batch");
  // The oscillating term does not depend on the sample.
  double acc = 0.0;
  for (std::size_t i : indices) {
    const double r = x[0] - offsets_.at(i) - kPi / 2.0;
    acc += r * r;
  }
  return std::exp(std::sin(2.0 * x[0] * x[0])) + 0.1 * acc / static_cast<double>(indices.size());
}

void Oscillatory::grad_sample(std::span<const double> x, std::size_t i,
                              std::span<double> out) const {
  check_dim(x, 1);
  out[0] = sample_grad(x[0], offsets_.at(i));
}

std::optional<KnownMinimum> Oscillatory::known_min() const {
  const double x = kPi / 2.0;
  return KnownMinimum{{x}, eval(std::span<const double>(&x, 1))};
}

// ---------------------------------------------------------------- Quadratic

Quadratic::Quadratic(std::size_t dim, std::vector<double> centers, double scale)
    : d_(dim), n_(dim == 0 ? 0 : centers.size() / dim), centers_(std::move(centers)),
      scale_(scale) {
  if (d_ == 0 || n_ == 0 || centers_.size() != n_ * d_)
    throw ConfigError("quadratic centers must form a nonempty n x d array");
  if (!(scale_ > 0.0)) throw ConfigError("quadratic scale must be positive");
}

Quadratic Quadratic::origin(std::size_t dim) { return Quadratic(dim, std::vector<double>(dim)); }

double Quadratic::eval_sample(std::span<const double> x, std::size_t i) const {
  check_dim(x, d_);
  if (i >= n_) throw InputError("sample index out of range");
  double acc = 0.0;
  for (std::size_t k = 0; k < d_; ++k) {
    const double r = x[k] - centers_[i * d_ + k];
    acc += r * r;
  }
  return scale_ * acc;
}

double Quadratic::eval(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) acc += eval_sample(x, i);
  return acc / static_cast<double>(n_);
}

void Quadratic::grad_sample(std::span<const double> x, std::size_t i,
                            std::span<double> out) const {
  check_dim(x, d_);
  if (i >= n_) throw InputError("sample index out of range");
  for (std::size_t k = 0; k < d_; ++k) out[k] = 2.0 * scale_ * (x[k] - centers_[i * d_ + k]);
}

std::optional<KnownMinimum> Quadratic::known_min() const {
  std::vector<double> m(d_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < d_; ++k) m[k] += centers_[i * d_ + k];
  for (double& v : m) v /= static_cast<double>(n_);
  const double value = eval(m);
  return KnownMinimum{std::move(m), value};
}

// ---------------------------------------------------------------- softmax net

void LabeledData::validate() const {
  if (input_dim == 0) throw InputError("dataset input dimension is zero");
  if (n_classes == 0) throw InputError("dataset has no classes");
  if (inputs.size() != labels.size() * input_dim)
    throw InputError("dataset has " + std::to_string(inputs.size()) + " input values for " +
                     std::to_string(labels.size()) + " labels of dimension " +
                     std::to_string(input_dim));
  for (auto l : labels)
    if (l >= n_classes) throw InputError("label " + std::to_string(l) + " out of range");
}

void relu_softmax(std::span<double> z) {
  double top = 0.0;
  for (double& v : z) {
    v = std::max(v, 0.0);
    top = std::max(top, v);
  }
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
}

double cross_entropy(std::span<const double> f, std::span<const double> y) {
  if (f.size() != y.size() || f.empty()) throw InputError("prediction and label differ in size");
  std::size_t hot = y.size();
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y[k] == 1.0) {
      if (hot != y.size()) throw InputError("label has more than one hot entry");
      hot = k;
    } else if (y[k] != 0.0) {
      throw InputError("label is not one-hot");
    }
  }
  if (hot == y.size()) throw InputError("label has no hot entry");
  return -std::log(std::max(f[hot], kProbabilityFloor));
}

SoftmaxNet::SoftmaxNet(std::shared_ptr<const LabeledData> train)
    : train_(std::move(train)), p_(train_->input_dim), k_(train_->n_classes) {
  train_->validate();
  if (train_->size() == 0) throw ConfigError("softmax objective needs a nonempty training set");
}

void SoftmaxNet::logits(std::span<const double> x, std::span<const float> input,
                        std::span<double> z) const {
  if (x.size() != dim()) check_dim(x, dim());
  if (input.size() != p_ || z.size() != k_) throw InputError("softmax input dimension mismatch");
  const double* bias = x.data() + k_ * p_;
  for (std::size_t k = 0; k < k_; ++k) {
    const double* row = x.data() + k * p_;
    double acc = bias[k];
    for (std::size_t i = 0; i < p_; ++i) acc += row[i] * static_cast<double>(input[i]);
    z[k] = acc;
  }
}

void SoftmaxNet::forward(std::span<const double> x, std::span<const float> input,
                         std::span<double> probs) const {
  logits(x, input, probs);
  relu_softmax(probs);
}

std::size_t SoftmaxNet::predict(std::span<const double> x, std::span<const float> input) const {
  std::vector<double> z(k_);
  logits(x, input, z);
  // Softmax is monotone, so the argmax of ReLU(z) decides; exact ties stay ties.
  std::size_t best = 0;
  for (std::size_t k = 0; k < k_; ++k) {
    z[k] = std::max(z[k], 0.0);
    if (z[k] > z[best]) best = k;
  }
  return best;
}

double SoftmaxNet::eval_sample(std::span<const double> x, std::size_t i) const {
  std::vector<double> f(k_);
  forward(x, train_->input(i), f);
  return -std::log(std::max(f[train_->labels.at(i)], kProbabilityFloor));
}

double SoftmaxNet::eval(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < train_->size(); ++i) acc += eval_sample(x, i);
  return acc / static_cast<double>(train_->size());
}

void SoftmaxNet::grad_sample(std::span<const double> x, std::size_t i,
                             std::span<double> out) const {
  if (out.size() != dim()) throw InputError("gradient buffer has the wrong size");
  auto input = train_->input(i);
  const std::size_t label = train_->labels.at(i);
  std::vector<double> z(k_);
  logits(x, input, z);
  std::vector<double> f = z;
  relu_softmax(f);
  std::fill(out.begin(), out.end(), 0.0);
  // The floor makes the loss locally constant.
  if (f[label] < kProbabilityFloor) return;
  double* bias = out.data() + k_ * p_;
  for (std::size_t k = 0; k < k_; ++k) {
    if (z[k] <= 0.0) continue;
    const double dz = f[k] - (k == label ? 1.0 : 0.0);
    double* row = out.data() + k * p_;
    for (std::size_t j = 0; j < p_; ++j) row[j] = dz * static_cast<double>(input[j]);
    bias[k] = dz;
  }
}

double test_accuracy(const SoftmaxNet& net, std::span<const double> x, const LabeledData& test) {
  if (test.size() == 0) throw DomainError("empty test set");
  if (test.input_dim != net.input_dim() || test.n_classes != net.n_classes())
    throw InputError("test set shape does not match the network");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (net.predict(x, test.input(i)) == test.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace cbo
