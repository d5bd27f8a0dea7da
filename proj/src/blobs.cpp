#include "cbo/harness/blobs.hpp"

#include <algorithm>
#include <vector>

#include "cbo/errors.hpp"
#include "cbo/rng.hpp"

namespace cbo::harness {

void BlobSpec::validate() const {
  if (n_train == 0) throw ConfigError("blobs.n_train must be positive");
  if (n_classes < 2 || n_classes > 255) throw ConfigError("blobs.n_classes must be in 2..255");
  if (input_dim < n_classes)
    throw ConfigError("blobs.input_dim must be at least the number of classes");
  if (!(spread >= 0.0)) throw ConfigError("blobs.spread must be non-negative");
}

namespace {

LabeledData draw(const BlobSpec& spec, const std::vector<double>& prototypes, std::size_t n,
                 Rng rng) {
  LabeledData out;
  out.input_dim = spec.input_dim;
  out.n_classes = spec.n_classes;
  out.inputs.resize(n * spec.input_dim);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = static_cast<std::uint8_t>(i % spec.n_classes);
  std::shuffle(out.labels.begin(), out.labels.end(), rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double* proto = prototypes.data() + out.labels[i] * spec.input_dim;
    for (std::size_t k = 0; k < spec.input_dim; ++k)
      out.inputs[i * spec.input_dim + k] =
          static_cast<float>(std::clamp(proto[k] + spec.spread * rng.normal(), 0.0, 1.0));
  }
  return out;
}

}  // namespace

BlobData make_blobs(const BlobSpec& spec) {
  spec.validate();
  Rng master(spec.seed, 0xB10B);
  Rng proto_rng = master.split(0);
  const std::size_t stripe = spec.input_dim / spec.n_classes;
  std::vector<double> prototypes(spec.n_classes * spec.input_dim);
  for (std::size_t c = 0; c < spec.n_classes; ++c)
    for (std::size_t k = 0; k < spec.input_dim; ++k) {
      const bool own = k / stripe == c;
      prototypes[c * spec.input_dim + k] = own ? proto_rng.uniform(0.7, 1.0) : proto_rng.uniform(0.0, 0.2);
    }
  return {draw(spec, prototypes, spec.n_train, master.split(1)),
          draw(spec, prototypes, spec.n_test, master.split(2))};
}

}  // namespace cbo::harness
