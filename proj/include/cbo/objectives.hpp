#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cbo/objective.hpp"

namespace cbo {

/// (1/d) sum_i [(x_i - B)^2 - 10 cos(2 pi (x_i - B)) + 10] + C, minimized at B*1 with value C.
class Rastrigin final : public Objective {
 public:
  explicit Rastrigin(std::size_t dim, double shift = 0.0, double lift = 0.0);

  std::size_t dim() const override { return d_; }
  double eval(std::span<const double> x) const override;
  std::optional<KnownMinimum> known_min() const override;
  /// Sup of the Hessian diagonal: (2 + 40 pi^2) / d.
  std::optional<double> curvature_bound() const override;
  std::string name() const override { return "rastrigin"; }

  double shift() const { return shift_; }
  double lift() const { return lift_; }

 private:
  std::size_t d_;
  double shift_;
  double lift_;
};

/// One-dimensional finite-sum test problem with wide, flat local minima:
///   l_i(x) = exp(sin(2 x^2)) + (1/10) (x - s_i - pi/2)^2,  s_i ~ N(0, 0.1).
/// The s_i are drawn at construction from `seed` (0.1 is the variance).
class Oscillatory final : public Objective {
 public:
  Oscillatory(std::size_t n_samples, std::uint64_t seed);
  explicit Oscillatory(std::vector<double> offsets);

  std::size_t dim() const override { return 1; }
  double eval(std::span<const double> x) const override;
  std::size_t n_samples() const override { return offsets_.size(); }
  double eval_sample(std::span<const double> x, std::size_t i) const override;
  double eval_batch(std::span<const double> x,
                    std::span<const std::size_t> indices) const override;
  bool has_gradient() const override { return true; }
  void grad_sample(std::span<const double> x, std::size_t i, std::span<double> out) const override;
  /// Nominal minimizer pi/2 with the loss there.
  std::optional<KnownMinimum> known_min() const override;
  std::string name() const override { return "oscillatory"; }

  static double sample_loss(double x, double offset);
  static double sample_grad(double x, double offset);

  const std::vector<double>& offsets() const { return offsets_; }

 private:
  std::vector<double> offsets_;
};

/// Sum of squares around a set of centers: l_i(x) = scale |x - c_i|^2, L = mean_i l_i.
class Quadratic final : public Objective {
 public:
  /// `centers` is row-major n×dim.
  Quadratic(std::size_t dim, std::vector<double> centers, double scale = 1.0);
  /// |x|^2 in `dim` dimensions.
  static Quadratic origin(std::size_t dim);

  std::size_t dim() const override { return d_; }
  double eval(std::span<const double> x) const override;
  std::size_t n_samples() const override { return n_; }
  double eval_sample(std::span<const double> x, std::size_t i) const override;
  bool has_gradient() const override { return true; }
  void grad_sample(std::span<const double> x, std::size_t i, std::span<double> out) const override;
  std::optional<KnownMinimum> known_min() const override;
  std::optional<double> curvature_bound() const override { return 2.0 * scale_; }
  std::string name() const override { return "quadratic"; }

 private:
  std::size_t d_;
  std::size_t n_;
  std::vector<double> centers_;
  double scale_;
};

/// Labeled inputs; labels are class indices, read as one-hot vectors.
struct LabeledData {
  std::size_t input_dim = 0;
  std::size_t n_classes = 10;
  /// Row-major size()×input_dim.
  std::vector<float> inputs;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const float> input(std::size_t i) const {
    return {inputs.data() + i * input_dim, input_dim};
  }
  /// Throws InputError if shapes disagree or a label is out of range.
  void validate() const;
};

/// Class probabilities softmax(ReLU(theta * input + b)), parameters flattened as
/// (theta row-major K×p, then b).
class SoftmaxNet final : public Objective {
 public:
  explicit SoftmaxNet(std::shared_ptr<const LabeledData> train);

  std::size_t dim() const override { return k_ * p_ + k_; }
  double eval(std::span<const double> x) const override;
  std::size_t n_samples() const override { return train_->size(); }
  double eval_sample(std::span<const double> x, std::size_t i) const override;
  bool has_gradient() const override { return true; }
  void grad_sample(std::span<const double> x, std::size_t i, std::span<double> out) const override;
  std::string name() const override { return "softmax-net"; }

  std::size_t input_dim() const { return p_; }
  std::size_t n_classes() const { return k_; }
  const LabeledData& train() const { return *train_; }

  /// Writes K class probabilities into `probs`.
  void forward(std::span<const double> x, std::span<const float> input,
               std::span<double> probs) const;
  /// Argmax class; ties go to the lowest index.
  std::size_t predict(std::span<const double> x, std::span<const float> input) const;

 private:
  void logits(std::span<const double> x, std::span<const float> input, std::span<double> z) const;

  std::shared_ptr<const LabeledData> train_;
  std::size_t p_;
  std::size_t k_;
};

/// Probabilities below this are raised to it before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

/// Max-shifted softmax of ReLU(logits), in place.
void relu_softmax(std::span<double> z);

/// -log f_k for the hot index k of `y`; f is floored at kProbabilityFloor.
double cross_entropy(std::span<const double> f, std::span<const double> y);

/// Fraction of `test` classified correctly by parameters `x`.
double test_accuracy(const SoftmaxNet& net, std::span<const double> x, const LabeledData& test);

}  // namespace cbo
