#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "cbo/baselines.hpp"
#include "cbo/diagnostics.hpp"
#include "cbo/errors.hpp"
#include "cbo/objectives.hpp"
#include "cbo/schemes.hpp"

using namespace cbo;

namespace {

DataBatch full(std::size_t n) {
  DataBatch b;
  b.indices.resize(n);
  std::iota(b.indices.begin(), b.indices.end(), std::size_t{0});
  return b;
}

double anchored_ratio_isotropic(std::size_t d, double lambda, double sigma, double gamma) {
  const std::size_t n = 100000;
  Ensemble e = make_ensemble(InitSpec::gaussian(0.0, 1.0), n, d, 31);
  const std::vector<double> a(d, 0.0);
  const double before = e.second_moment_about(a);
  IsotropicCboParams p;
  p.base.lambda = lambda;
  p.base.gamma = gamma;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(32);
  isotropic_cbo_step(e, all, a, p, sigma, rng);
  return e.second_moment_about(a) / before;
}

}  // namespace

TEST_SUITE("sgd") {
  TEST_CASE("unit step on a quadratic jumps to the mean center") {
    const Quadratic q(2, {1.0, 2.0, 3.0, -4.0, -1.0, 5.0}, 0.5);
    const auto x = sgd_step(std::vector<double>{10.0, 10.0}, q, full(3), 1.0);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
  }

  TEST_CASE("zero gradient leaves x unchanged") {
    const Quadratic q(1, {2.0}, 0.5);
    CHECK(sgd_step(std::vector<double>{2.0}, q, full(1), 0.3) == std::vector<double>{2.0});
  }

  TEST_CASE("geometric decay 0.9^100") {
    const Quadratic q(1, {0.0}, 0.5);
    SgdParams p;
    p.gamma = 0.1;
    p.max_iters = 100;
    const auto rep = run_sgd(q, p, {1.0});
    CHECK(rep.iterations == 100);
    CHECK(rep.x[0] == doctest::Approx(std::pow(0.9, 100)));
    CHECK(rep.x[0] == doctest::Approx(2.656e-5).epsilon(1e-3));
  }

  TEST_CASE("observer can stop early") {
    const Quadratic q(1, {0.0}, 0.5);
    SgdParams p;
    p.gamma = 0.1;
    p.max_iters = 100;
    const auto rep = run_sgd(q, p, {1.0}, [](std::size_t k, std::span<const double>) { return k < 5; });
    CHECK(rep.iterations == 5);
    CHECK(rep.x[0] == doctest::Approx(std::pow(0.9, 5)));
  }

  TEST_CASE("objectives without gradients are rejected") {
    SgdParams p;
    CHECK_THROWS_AS(run_sgd(Rastrigin(2), p, {0.0, 0.0}), UnsupportedError);
    p.gamma = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }

  TEST_CASE("property: oscillatory sgd stays trapped away from pi/2") {
    const Oscillatory obj(20, 7);
    SgdParams p;
    p.gamma = 0.01;
    p.batch = 20;
    p.max_iters = 10000;
    int trapped = 0;
    for (int s = 0; s < 10; ++s) {
      p.seed = s;
      const double x0 = -3.0 + 0.1 * s;
      const auto rep = run_sgd(obj, p, {x0});
      if (std::abs(rep.x[0] - std::numbers::pi / 2) >= 0.25) ++trapped;
    }
    CHECK(trapped >= 8);
  }
}

TEST_SUITE("isotropic cbo") {
  TEST_CASE("noise-free unit step lands on x*") {
    std::vector<double> x{3.0, -1.0}, xs{0.5, 0.5}, z{1.0, 1.0};
    isotropic_move(x, xs, 2.0, 0.0, 0.5, 1.0, z);
    CHECK(x == xs);
  }

  TEST_CASE("noise scale is the full distance") {
    std::vector<double> x{3.0, 4.0}, xs{0.0, 0.0}, z{0.5, -1.0};
    isotropic_move(x, xs, 1.0, 0.2, 0.04, 1.0, z);
    // Drift 0.96 of the offset, noise 0.2*0.2*5 per unit draw.
    CHECK(x[0] == doctest::Approx(3 * 0.96 + 0.2 * 0.5));
    CHECK(x[1] == doctest::Approx(4 * 0.96 - 0.2));
  }

  TEST_CASE("heaviside factor scales only the drift") {
    std::vector<double> x{2.0}, xs{0.0}, z{0.0};
    isotropic_move(x, xs, 1.0, 0.5, 0.1, 0.0, z);
    CHECK(x[0] == 2.0);
  }

  TEST_CASE("anchored second-moment multiplier at d = 20") {
    const double expect = (1 - 0.01) * (1 - 0.01) + 20 * 0.09 * 0.01;
    CHECK(expect == doctest::Approx(0.9981));
    CHECK(anchored_ratio_isotropic(20, 1.0, 0.3, 0.01) == doctest::Approx(expect).epsilon(0.02));
  }

  TEST_CASE("d = 1 matches the component-wise multiplier") {
    const double iso = anchored_ratio_isotropic(1, 1.0, 0.5, 0.01);
    const double cw = (1 - 0.01) * (1 - 0.01) + 0.25 * 0.01;
    CHECK(iso == doctest::Approx(cw).epsilon(0.02));
  }

  TEST_CASE("property: isotropic grows at d = 20 while component-wise contracts") {
    const auto iso = anchored_decay_experiment(AnchoredScheme::isotropic_euler, 1.0, 0.45, 20, 10000, 100, 0.01, 3);
    const auto cw = anchored_decay_experiment(AnchoredScheme::componentwise_euler, 1.0, 0.45, 20, 10000, 100, 0.01, 3);
    CHECK(iso.slope > 3 * iso.std_error);
    CHECK(cw.slope < -3 * cw.std_error);
  }

  TEST_CASE("runs end to end and is reproducible") {
    const Rastrigin obj(2);
    IsotropicCboParams p;
    p.base.n_particles = 40;
    p.base.batch_particles = 40;
    p.base.sigma = 0.3;
    p.base.max_iters = 300;
    const auto a = run_isotropic_cbo(obj, p, InitSpec::uniform(-3, 3), 1);
    const auto b = run_isotropic_cbo(obj, p, InitSpec::uniform(-3, 3), 1);
    CHECK(a.final_consensus == b.final_consensus);
    CHECK(a.final_loss < obj.eval(std::vector<double>{3.0, 3.0}));
  }

  TEST_CASE("logistic heaviside needs a positive width") {
    IsotropicCboParams p;
    p.heaviside = Heaviside::logistic;
    p.heaviside_eps = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}
