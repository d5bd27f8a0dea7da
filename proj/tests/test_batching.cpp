#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "cbo/batching.hpp"
#include "cbo/errors.hpp"
#include "cbo/objectives.hpp"

using namespace cbo;

namespace {

// Per-sample losses fixed by a table, for arithmetic checks.
class TableObjective final : public Objective {
 public:
  explicit TableObjective(std::vector<double> values) : v_(std::move(values)) {}
  std::size_t dim() const override { return 1; }
  double eval(std::span<const double>) const override {
    return std::accumulate(v_.begin(), v_.end(), 0.0) / static_cast<double>(v_.size());
  }
  std::size_t n_samples() const override { return v_.size(); }
  double eval_sample(std::span<const double>, std::size_t i) const override { return v_.at(i); }
  std::string name() const override { return "table"; }

 private:
  std::vector<double> v_;
};

// Visits every m-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t m, F f) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    f(idx);
    std::size_t k = m;
    while (k > 0 && idx[k - 1] == n - m + (k - 1)) --k;
    if (k == 0) return;
    ++idx[k - 1];
    for (std::size_t t = k; t < m; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace

TEST_SUITE("particle batches") {
  TEST_CASE("batch counts follow floor((N + |R|) / M)") {
    Rng rng(1);
    BatchPlan plan(5, 2);
    auto b = next_particle_batches(plan, rng);
    CHECK(b.size() == 2);
    CHECK(plan.remainder().size() == 1);
    b = next_particle_batches(plan, rng);
    CHECK(b.size() == 3);
    CHECK(plan.remainder().empty());

    BatchPlan carried(5, 2, {3});
    CHECK(next_particle_batches(carried, rng).size() == 3);
    CHECK(carried.remainder().empty());
  }

  TEST_CASE("N = M gives one batch holding a permutation") {
    Rng rng(2);
    BatchPlan plan(6, 6);
    auto b = next_particle_batches(plan, rng);
    REQUIRE(b.size() == 1);
    auto sorted = b[0];
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(BatchPlan(5, 0), ConfigError);
    CHECK_THROWS_AS(BatchPlan(5, 6), ConfigError);
    CHECK_THROWS_AS(BatchPlan(5, 2, {1, 1}), Error);
    CHECK_THROWS_AS(BatchPlan(5, 2, {0, 1}), Error);
    CHECK_THROWS_AS(BatchPlan(5, 2, {7}), Error);
  }

  TEST_CASE("property: epoch exactness and remainder bound") {
    for (auto [n, m] : {std::pair{7, 3}, {10, 4}, {100, 20}, {9, 9}, {13, 1}, {5, 2}}) {
      Rng rng(static_cast<std::uint64_t>(n * 31 + m));
      BatchPlan plan(n, m);
      std::vector<int> count(n, 0);
      for (int call = 0; call < 50; ++call) {
        for (const auto& batch : next_particle_batches(plan, rng)) {
          CHECK(batch.size() == static_cast<std::size_t>(m));
          for (auto j : batch) ++count.at(j);
          const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
          CHECK(*hi - *lo <= 1);
        }
        CHECK(plan.remainder().size() < static_cast<std::size_t>(m));
        std::set<std::size_t> uniq(plan.remainder().begin(), plan.remainder().end());
        CHECK(uniq.size() == plan.remainder().size());
      }
    }
  }

  TEST_CASE("same seed, same batches") {
    Rng a(3), b(3);
    BatchPlan pa(17, 5), pb(17, 5);
    for (int i = 0; i < 10; ++i) CHECK(next_particle_batches(pa, a) == next_particle_batches(pb, b));
  }
}

TEST_SUITE("data batches") {
  TEST_CASE("m = n is a permutation") {
    Rng rng(4);
    auto b = sample_data_batch(9, 9, rng).indices;
    std::sort(b.begin(), b.end());
    std::vector<std::size_t> all(9);
    std::iota(all.begin(), all.end(), std::size_t{0});
    CHECK(b == all);
  }

  TEST_CASE("single draws are uniform") {
    Rng rng(5);
    std::vector<int> counts(4, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[sample_data_batch(4, 1, rng).indices[0]];
    for (int c : counts) CHECK(std::abs(c / double(draws) - 0.25) < 0.01);
  }

  TEST_CASE("pairs are valid 2-subsets and all six appear evenly") {
    Rng rng(6);
    std::map<std::pair<std::size_t, std::size_t>, int> seen;
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
      auto b = sample_data_batch(4, 2, rng).indices;
      REQUIRE(b.size() == 2);
      REQUIRE(b[0] != b[1]);
      REQUIRE(std::max(b[0], b[1]) < 4);
      ++seen[{std::min(b[0], b[1]), std::max(b[0], b[1])}];
    }
    CHECK(seen.size() == 6);
    for (const auto& [pair, c] : seen) CHECK(std::abs(c / double(draws) - 1.0 / 6) < 0.01);
  }

  TEST_CASE("errors") {
    Rng rng(7);
    CHECK_THROWS_AS(sample_data_batch(3, 4, rng), ConfigError);
    CHECK_THROWS_AS(sample_data_batch(3, 0, rng), ConfigError);
  }
}

TEST_SUITE("minibatch loss") {
  TEST_CASE("arithmetic mean of the batch") {
    TableObjective obj({1, 2, 3, 4});
    const std::vector<double> x{0.0};
    CHECK(minibatch_loss(obj, x, DataBatch{{0, 1}}) == doctest::Approx(1.5));
    CHECK(minibatch_loss(obj, x, DataBatch{{0, 1, 2, 3}}) == doctest::Approx(obj.eval(x)));
  }

  TEST_CASE("average over all 2-subsets equals the full loss") {
    TableObjective obj({1, 2, 3, 4});
    const std::vector<double> x{0.0};
    double sum = 0.0;
    int count = 0;
    for_each_subset(4, 2, [&](const std::vector<std::size_t>& s) {
      sum += minibatch_loss(obj, x, DataBatch{s});
      ++count;
    });
    CHECK(count == 6);
    CHECK(sum / count == doctest::Approx(2.5));
  }

  TEST_CASE("property: unbiased over every C(n, m) subset for n <= 8") {
    Rng rng(8);
    for (std::size_t n = 1; n <= 8; ++n) {
      std::vector<double> offsets(n);
      for (double& v : offsets) v = rng.uniform(-1, 1);
      Oscillatory obj(offsets);
      const std::vector<double> x{rng.uniform(-3, 3)};
      for (std::size_t m = 1; m <= n; ++m) {
        double sum = 0.0;
        std::size_t count = 0;
        for_each_subset(n, m, [&](const std::vector<std::size_t>& s) {
          sum += minibatch_loss(obj, x, DataBatch{s});
          ++count;
        });
        const double full = obj.eval(x);
        CHECK(std::abs(sum / double(count) - full) <= 1e-12 * std::abs(full));
      }
    }
  }

  TEST_CASE("errors") {
    Rastrigin r(2);
    const std::vector<double> x{0.0, 0.0};
    CHECK_THROWS_AS(minibatch_loss(r, x, DataBatch{{0}}), UnsupportedError);
    TableObjective obj({1, 2});
    CHECK_THROWS_AS(minibatch_loss(obj, std::vector<double>{0.0}, DataBatch{{5}}), Error);
  }
}
