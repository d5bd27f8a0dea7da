#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "cbo_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(CBO_CLI_PATH) + " " + args + " > " + (kDir / "log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  const auto p = kDir / name;
  std::ofstream(p) << text;
  return p;
}

std::string config(const std::string& out) {
  return R"({ "objective": { "type": "quadratic", "dim": 2 },
              "methods": [ { "type": "cbo", "sigma": 0, "n_particles": 10, "gamma": 0.1,
                             "update_mode": "full", "max_iters": 200 } ],
              "init": { "type": "uniform", "low": -1, "high": 1 },
              "repetitions": 2, "output_dir": ")" + out + "\" }";
}

}  // namespace

TEST_CASE("exit codes") {
  fs::remove_all(kDir);
  const auto good = write("good.json", config((kDir / "out").string()));
  CHECK(run("validate " + good.string()) == 0);
  CHECK(run("run " + good.string() + " --no-timing") == 0);
  CHECK(fs::exists(kDir / "out" / "summary.csv"));

  CHECK(run("validate " + write("bad.json", "{ \"repetitions\": 0 }").string()) == 2);
  CHECK(run("validate " + write("typo.json", "{ \"repetitons\": 1 }").string()) == 2);
  CHECK(run("run " + (kDir / "missing.json").string()) == 2);
  CHECK(run("frobnicate x") == 2);
  CHECK(run("run") == 2);
  CHECK(run("train " + good.string()) == 2);

  // Output lands under a regular file, so writing fails at run time.
  write("blocker", "x");
  CHECK(run("run " + write("blocked.json", config((kDir / "blocker" / "out").string())).string()) == 3);
}

TEST_CASE("overrides reach the run") {
  const auto good = write("good2.json", config((kDir / "ignored").string()));
  CHECK(run("run " + good.string() + " --out " + (kDir / "override").string() + " --threads 2") == 0);
  CHECK(fs::exists(kDir / "override" / "runs_cbo.csv"));
  CHECK_FALSE(fs::exists(kDir / "ignored"));
}
