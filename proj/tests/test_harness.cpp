#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "cbo/errors.hpp"
#include "cbo/harness/blobs.hpp"
#include "cbo/harness/config.hpp"
#include "cbo/harness/csv.hpp"
#include "cbo/harness/experiments.hpp"
#include "cbo/harness/idx.hpp"

using namespace cbo;
using namespace cbo::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "cbo_harness_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({ "objective": { "type": "rastrigin", "dim": 2 }, "methods": [ { "type": "cbo" } ] })";

std::string quadratic_config(const fs::path& out, int reps, const std::string& extra = "") {
  return R"({
    "name": "q",
    "objective": { "type": "quadratic", "dim": 2 },
    "methods": [ { "name": "cbo", "type": "cbo", "sigma": 0.0, "n_particles": 20,
                   "batch_particles": 20, "gamma": 0.1, "update_mode": "full",
                   "epsilon_stop": 1e-12, "max_iters": 2000 } ],
    "init": { "type": "uniform", "low": -1, "high": 1 },
    "repetitions": )" + std::to_string(reps) + R"(,
    "seeds": { "base": 1 },
    "output_dir": ")" + out.string() + "\"" + extra + "}";
}

std::string zeros(std::size_t n) {
  std::string s = "0";
  for (std::size_t i = 1; i < n; ++i) s += ",0";
  return s;
}

std::string zero_rows(std::size_t rows, std::size_t n) {
  std::string s = "[" + zeros(n) + "]";
  for (std::size_t r = 1; r < rows; ++r) s += ",[" + zeros(n) + "]";
  return s;
}

std::string blobs_config(const fs::path& out, int epochs, std::string init = "",
                         int particles = 10) {
  if (init.empty())
    init = R"({ "type": "explicit", "positions": [)" + zero_rows(particles, 210) + "] }";
  return R"({
    "objective": { "type": "softmax_net",
      "dataset": { "source": "blobs",
        "blobs": { "n_train": 200, "n_test": 100, "input_dim": 20, "n_classes": 10, "seed": 3 } } },
    "methods": [ { "name": "cbo", "type": "cbo", "n_particles": )" + std::to_string(particles) +
         R"(, "batch_particles": 10, "batch_data": 20, "sigma": 0.3, "beta": 30, "gamma": 0.1,
                   "stop_on_criterion": false, "max_iters": 100000 },
                 { "name": "sgd", "type": "sgd", "gamma": 1.0, "batch": 20 } ],
    "init": )" + init + R"(,
    "training": { "epochs": )" + std::to_string(epochs) + R"(, "loss_subset": 100 },
    "record_timing": false,
    "output_dir": ")" + out.string() + "\" }";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal config fills defaults") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.repetitions == 1);
    CHECK(cfg.success_threshold == 0.25);
    CHECK(cfg.methods.size() == 1);
    CHECK(cfg.methods[0].cbo.batch_particles == cfg.methods[0].cbo.n_particles);
    const std::string echo = describe_config(cfg);
    CHECK(echo.find("\"lambda\"") != std::string::npos);
    CHECK(echo.find("\"repetitions\": 1") != std::string::npos);
  }

  TEST_CASE("validation names the field") {
    CHECK(error_of(R"({ "objective": { "type": "rastrigin", "dim": 2 }, "methods": [ { "type": "cbo" } ],
                      "repetitions": 0 })").find("repetitions") != std::string::npos);
    CHECK(error_of(R"({ "objective": { "type": "rastrigin", "dim": 2 },
                      "methods": [ { "type": "cbo", "lambda": -1 } ] })").find("methods[0]") != std::string::npos);
  }

  TEST_CASE("unknown keys suggest the closest one") {
    const std::string e = error_of(R"({ "objective": { "type": "rastrigin", "dim": 2 },
                                        "methods": [ { "type": "cbo", "sigmma": 1 } ] })");
    CHECK(e.find("sigmma") != std::string::npos);
    CHECK(e.find("did you mean 'sigma'") != std::string::npos);
    CHECK(suggest_key("lamda", {"lambda", "beta"}) == "lambda");
    CHECK(suggest_key("zzzzzz", {"lambda", "beta"}).empty());
  }

  TEST_CASE("syntax errors carry a position") {
    const std::string e = error_of("{\n  \"name\": ,\n}");
    CHECK(e.find("line") != std::string::npos);
  }

  TEST_CASE("comments are allowed") {
    CHECK_NOTHROW(parse_config(std::string("// note\n") + kMinimal));
  }

  TEST_CASE("missing idx files are a config error unless falling back") {
    const std::string idx = R"({ "objective": { "type": "softmax_net", "dataset": { "source": "idx",
        "train_images": "nope1", "train_labels": "nope2", "test_images": "nope3", "test_labels": "nope4" )";
    CHECK(error_of(idx + "} }, \"methods\": [ { \"type\": \"sgd\" } ] }").find("train_images") != std::string::npos);
    CHECK_NOTHROW(parse_config(idx + ", \"fallback_to_blobs\": true } }, \"methods\": [ { \"type\": \"sgd\" } ] }"));
  }

  TEST_CASE("sgd needs gradients") {
    CHECK_FALSE(error_of(R"({ "objective": { "type": "rastrigin", "dim": 2 },
                             "methods": [ { "type": "sgd" } ] })").empty());
  }

  TEST_CASE("all shipped configs validate") {
    for (const auto& entry : fs::directory_iterator(CBO_CONFIG_DIR)) {
      CAPTURE(entry.path().string());
      CHECK_NOTHROW(load_config(entry.path()));
    }
  }
}

TEST_SUITE("idx") {
  TEST_CASE("hand-crafted 2-image 3x3 file") {
    const auto dir = scratch("idx_ok");
    std::vector<unsigned char> img{0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 3};
    for (int i = 0; i < 18; ++i) img.push_back(i % 2 ? 255 : 0);
    img[16 + 17] = 51;
    write_bytes(dir / "img", img);
    write_bytes(dir / "lbl", {0, 0, 8, 1, 0, 0, 0, 2, 7, 3});
    const auto ds = load_idx(dir / "img", dir / "lbl");
    CHECK(ds.rows == 3);
    CHECK(ds.cols == 3);
    CHECK(ds.data.input_dim == 9);
    REQUIRE(ds.data.size() == 2);
    CHECK(ds.data.inputs[0] == 0.0f);
    CHECK(ds.data.inputs[1] == 1.0f);
    CHECK(ds.data.inputs[17] == doctest::Approx(0.2));
    CHECK(ds.data.labels == std::vector<std::uint8_t>{7, 3});
    CHECK(load_idx(dir / "img", dir / "lbl", 1).data.size() == 1);
  }

  TEST_CASE("writers round-trip") {
    const auto dir = scratch("idx_rt");
    const std::vector<std::uint8_t> px{0, 255, 128, 64, 1, 2, 3, 4};
    write_idx_images(dir / "i", 2, 2, px);
    write_idx_labels(dir / "l", {1, 9});
    const auto ds = load_idx(dir / "i", dir / "l");
    for (std::size_t k = 0; k < px.size(); ++k) CHECK(ds.data.inputs[k] == doctest::Approx(px[k] / 255.0));
  }

  TEST_CASE("bad files") {
    const auto dir = scratch("idx_bad");
    write_idx_images(dir / "i", 2, 2, {0, 1, 2, 3, 4, 5, 6, 7});
    write_idx_labels(dir / "l", {1, 2});
    write_idx_labels(dir / "l3", {1, 2, 3});
    try {
      load_idx(dir / "i", dir / "i");
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("2051") != std::string::npos);
    }
    CHECK_THROWS_AS(load_idx(dir / "i", dir / "l3"), ConsistencyError);
    auto bytes = slurp(dir / "i");
    bytes.resize(bytes.size() - 3);
    write_bytes(dir / "short", std::vector<unsigned char>(bytes.begin(), bytes.end()));
    CHECK_THROWS_AS(load_idx(dir / "short", dir / "l"), LengthError);
    write_bytes(dir / "stub", {0, 0, 8});
    CHECK_THROWS_AS(load_idx(dir / "stub", dir / "l"), LengthError);
    write_bytes(dir / "l10", {0, 0, 8, 1, 0, 0, 0, 2, 1, 10});
    CHECK_THROWS_AS(load_idx(dir / "i", dir / "l10"), FormatError);
  }
}

TEST_SUITE("blobs") {
  TEST_CASE("shape, range and determinism") {
    BlobSpec s;
    s.n_train = 100;
    s.n_test = 50;
    s.input_dim = 30;
    s.seed = 4;
    const auto a = make_blobs(s), b = make_blobs(s);
    CHECK(a.train.size() == 100);
    CHECK(a.test.size() == 50);
    CHECK(a.train.inputs == b.train.inputs);
    for (float v : a.train.inputs) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    std::vector<int> counts(10, 0);
    for (auto l : a.train.labels) ++counts[l];
    for (int c : counts) CHECK(c == 10);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("round trip keeps doubles exact") {
    const auto dir = scratch("csv");
    CsvTable t;
    t.header = {"a", "b"};
    const double x = 0.1 + 0.2, y = -1.0 / 3.0;
    t.rows = {{format_double(x), format_double(y)}, {"1", "2"}};
    write_csv(dir / "sub" / "t.csv", t);
    const auto back = read_csv(dir / "sub" / "t.csv");
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.number(0, "a") == x);
    CHECK(back.number(0, "b") == y);
    CHECK_THROWS(back.column("c"));
  }

  TEST_CASE("commas are refused and ragged rows rejected") {
    const auto dir = scratch("csv_bad");
    CsvTable t;
    t.header = {"a"};
    t.rows = {{"1,2"}};
    CHECK_THROWS(write_csv(dir / "x.csv", t));
    std::ofstream(dir / "r.csv") << "a,b\n1\n";
    CHECK_THROWS(read_csv(dir / "r.csv"));
  }
}

TEST_SUITE("success experiment") {
  TEST_CASE("noise-free cbo on |x|^2 always succeeds") {
    const auto dir = scratch("succ");
    const auto table = run_success_experiment(parse_config(quadratic_config(dir, 10)));
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].success_rate == 1.0);
    CHECK(table.rows[0].repetitions == 10);
    CHECK(table.runs[0].size() == 10);
  }

  TEST_CASE("property: summary agrees with the per-run file") {
    const auto dir = scratch("succ_files");
    auto cfg = parse_config(quadratic_config(dir, 5));
    cfg.methods[0].cbo.sigma = 0.5;
    cfg.methods[0].cbo.max_iters = 30;
    cfg.methods[0].cbo.scheme = Scheme::euler;
    run_success_experiment(cfg);
    const auto runs = read_csv(dir / "runs_cbo.csv");
    const auto summary = read_csv(dir / "summary.csv");
    REQUIRE(runs.rows.size() == 5);
    double s = 0, dist = 0;
    for (std::size_t r = 0; r < 5; ++r) {
      s += runs.number(r, "success");
      dist += runs.number(r, "final_distance");
    }
    CHECK(summary.number(0, "success_rate") == doctest::Approx(s / 5));
    CHECK(summary.number(0, "mean_distance") == doctest::Approx(dist / 5));
    CHECK(runs.header == std::vector<std::string>{"seed", "success", "final_distance", "iterations", "wall_ms"});
    CHECK(fs::exists(dir / "config.json"));
  }

  TEST_CASE("reruns give identical files with timing off") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const std::string extra = R"(, "record_timing": false, "threads": 2)";
    auto ca = parse_config(quadratic_config(a, 3, extra));
    auto cb = parse_config(quadratic_config(b, 3, extra));
    for (auto* c : {&ca, &cb}) {
      c->methods[0].cbo.sigma = 0.4;
      c->methods[0].cbo.max_iters = 50;
    }
    run_success_experiment(ca);
    run_success_experiment(cb);
    CHECK(slurp(a / "runs_cbo.csv") == slurp(b / "runs_cbo.csv"));
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  }

  TEST_CASE("success needs a known minimum") {
    const auto dir = scratch("nomin");
    auto cfg = parse_config(blobs_config(dir, 1));
    cfg.methods.resize(1);
    CHECK_THROWS_AS(run_success_experiment(cfg), ConfigError);
    CHECK_FALSE(fs::exists(dir / "summary.csv"));
  }
}

TEST_SUITE("training experiment") {
  TEST_CASE("zero epochs give the initial accuracy only") {
    const auto dir = scratch("train0");
    const auto cfg = parse_config(blobs_config(dir, 0));
    const auto results = run_training_experiment(cfg);
    REQUIRE(results.size() == 2);
    Dataset data = load_dataset(cfg.objective.dataset);
    double class0 = 0;
    for (auto l : data.test->labels) class0 += l == 0;
    class0 /= double(data.test->size());
    for (const auto& r : results) {
      REQUIRE(r.epochs.size() == 1);
      CHECK(r.epochs[0].epoch == 0);
      CHECK(r.epochs[0].test_accuracy == doctest::Approx(class0));
      CHECK(r.epochs[0].train_loss_estimate == doctest::Approx(std::log(10.0)));
    }
    const auto csv = read_csv(dir / "train_cbo.csv");
    CHECK(csv.header == std::vector<std::string>{"epoch", "test_accuracy", "train_loss_estimate", "wall_ms"});
    CHECK(csv.rows.size() == 1);
  }

  TEST_CASE("a few epochs learn separable blobs") {
    const auto dir = scratch("train3");
    const auto results = run_training_experiment(
        parse_config(blobs_config(dir, 10, R"({ "type": "gaussian", "mean": 0, "stddev": 1 })", 50)));
    for (const auto& r : results) {
      REQUIRE(r.epochs.size() == 11);
      CHECK(r.epochs.back().epoch == 10);
      CHECK(r.epochs.back().test_accuracy > r.epochs.front().test_accuracy);
    }
    CHECK(read_csv(dir / "train_sgd.csv").rows.size() == 11);
  }

  TEST_CASE("training needs a classifier objective") {
    CHECK_THROWS_AS(run_training_experiment(parse_config(kMinimal), false), ConfigError);
  }
}

TEST_SUITE("diagnostics experiment") {
  TEST_CASE("writes every requested table") {
    const auto dir = scratch("diag");
    const auto cfg = parse_config(R"({
      "objective": { "type": "rastrigin", "dim": 1 },
      "methods": [ { "type": "cbo", "n_particles": 50, "max_iters": 20, "sigma": 0.5 } ],
      "diagnostics": {
        "anchored": [ { "scheme": "exact_gbm", "particles": 1000, "steps": 20, "dim": 2 } ],
        "certificate": { "loss_min": 0 },
        "laplace": { "betas": [1, 10], "samples": 500 },
        "semidiscrete": { "refresh_every": 5 } },
      "output_dir": ")" + dir.string() + "\" }");
    const auto rep = run_diagnostics(cfg);
    CHECK(rep.anchored.size() == 1);
    CHECK(rep.certificate.has_value());
    CHECK(rep.laplace.size() == 2);
    CHECK(rep.semidiscrete.has_value());
    for (const char* f : {"anchored.csv", "certificate.csv", "laplace.csv", "semidiscrete.csv"}) {
      CAPTURE(f);
      CHECK_NOTHROW(read_csv(dir / f));
    }
  }
}
