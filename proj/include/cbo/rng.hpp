#pragma once

#include <cstdint>
#include <limits>

namespace cbo {

/// Counter-based random stream.
///
/// Output k of a stream is a pure function of (key, k), so a stream can be
/// split into independent children without sharing state. Child streams are
/// keyed by hashing the parent key with a stream id; the same (seed, stream)
/// pair always yields the same sequence, independent of how many other
/// streams exist or which thread consumes them.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Independent child stream. Does not advance this stream.
  Rng split(std::uint64_t stream) const { return Rng(key_, stream); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.key_ == b.key_ && a.counter_ == b.counter_ && a.has_spare_ == b.has_spare_ &&
           (!a.has_spare_ || a.spare_ == b.spare_);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  // Polar method yields normals in pairs.
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace cbo
