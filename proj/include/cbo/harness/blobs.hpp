#pragma once

#include <cstddef>
#include <cstdint>

#include "cbo/objectives.hpp"

namespace cbo::harness {

struct BlobSpec {
  std::size_t n_train = 10000;
  std::size_t n_test = 10000;
  std::size_t input_dim = 64;
  std::size_t n_classes = 10;
  /// Per-pixel standard deviation around the class prototype.
  double spread = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BlobData {
  LabeledData train;
  LabeledData test;
};

/// Gaussian clusters in [0, 1]^p. Each class owns a disjoint stripe of the pixels that
/// is bright in its prototype, so the classes are linearly separable up to the noise.
/// Labels cycle through the classes in shuffled order.
BlobData make_blobs(const BlobSpec& spec);

}  // namespace cbo::harness
