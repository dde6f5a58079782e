#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "ncdd/data_io.hpp"

using namespace ncdd;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args, const std::string& log_path) {
  const std::string command = std::string(NCDD_CLI_PATH) + " " + args + " > " + log_path + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

void write_config(const std::string& path, const std::string& extra = "") {
  std::ofstream out(path);
  out << R"({
  "domain": "time",
  "t_len": 96,
  "sampling_rate_hz": 64.0,
  "inner_windows": 2,
  "frequency_bins": 12,
  "k_iterations": 1,
  "aggregator": "mean",
  "activation": "relu",
  "epochs": 2,
  "learning_rate": 1e-06,
  "batch_size": 8,
  "eta_ratio": 0.5,
  "theta_mode": "scalar",
  "psi_mode": "scalar",
  "n_trees": 30,
  "subsample_ratio": 10,
  "seed": 11,
  "synth": {
    "n_nodes": 5,
    "n_samples_per_state": 12,
    "ar_coefficient": 0.5,
    "noise_sigma": 1.0,
    "f1_hz": 8.0,
    "coupling": 3.0
  })" << (extra.empty() ? "" : ",\n" + extra)
      << "\n}\n";
}

}  // namespace

TEST_CASE("full pipeline runs and emits metrics") {
  helpers::TempDir dir("cli_pipeline");
  const std::string config = dir.str("config.json");
  write_config(config);
  const std::string log = dir.str("log.txt");

  auto r = run_cli("synth --config " + config + " --out " + dir.str("data"), log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  r = run_cli("topology --config " + config + " --manifest " + dir.str("data/manifest.json") +
                  " --out " + dir.str("adjacency.csv"),
              log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  r = run_cli("topology --config " + config + " --manifest " + dir.str("data/manifest.json") +
                  " --out " + dir.str("adjacency_full.csv") + " --split full",
              log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  r = run_cli("train --config " + config + " --manifest " + dir.str("data/manifest.json") +
                  " --adjacency " + dir.str("adjacency.csv") + " --out " + dir.str("model"),
              log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  r = run_cli("infer --manifest " + dir.str("data/manifest.json") + " --params " +
                  dir.str("model/parameters.ncddp") + " --out " + dir.str("sims"),
              log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  r = run_cli("evaluate --config " + config + " --manifest " + dir.str("data/manifest.json") +
                  " --similarity-dir " + dir.str("sims") + " --out " + dir.str("metrics.json"),
              log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);

  std::ifstream metrics(dir.str("metrics.json"));
  REQUIRE(metrics.good());
  std::stringstream buffer;
  buffer << metrics.rdbuf();
  CHECK(buffer.str().find("\"auc\"") != std::string::npos);

  // classify additionally writes per-sample scores
  r = run_cli("classify --config " + config + " --manifest " + dir.str("data/manifest.json") +
                  " --similarity-dir " + dir.str("sims") + " --out " + dir.str("metrics2.json"),
              log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  CHECK(std::ifstream(dir.str("scores.csv")).good());
}

TEST_CASE("zero learning rate produces a constant loss trace") {
  helpers::TempDir dir("cli_lr0");
  const std::string config = dir.str("config.json");
  write_config(config);
  const std::string log = dir.str("log.txt");
  REQUIRE(run_cli("synth --config " + config + " --out " + dir.str("data"), log).exit_code == 0);
  REQUIRE(run_cli("topology --config " + config + " --manifest " + dir.str("data/manifest.json") +
                      " --out " + dir.str("adjacency.csv"),
                  log)
              .exit_code == 0);
  REQUIRE(run_cli("train --config " + config + " --set learning_rate=0 --set epochs=3" +
                      " --manifest " + dir.str("data/manifest.json") + " --adjacency " +
                      dir.str("adjacency.csv") + " --out " + dir.str("model"),
                  log)
              .exit_code == 0);
  const std::vector<double> trace = read_loss_trace(dir.str("model/loss_trace.csv"));
  REQUIRE(trace.size() == 3);
  CHECK(trace[1] == trace[0]);
  CHECK(trace[2] == trace[0]);
}

TEST_CASE("runs with the same seed are byte-identical") {
  helpers::TempDir dir("cli_determinism");
  const std::string config = dir.str("config.json");
  write_config(config);
  const std::string log = dir.str("log.txt");

  const auto read_bytes = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };

  for (const char* round : {"a", "b"}) {
    const std::string base = dir.str(round);
    REQUIRE(run_cli("synth --config " + config + " --out " + base + "/data", log).exit_code == 0);
    REQUIRE(run_cli("topology --config " + config + " --manifest " + base +
                        "/data/manifest.json --out " + base + "/adjacency.csv",
                    log)
                .exit_code == 0);
    REQUIRE(run_cli("train --config " + config + " --manifest " + base +
                        "/data/manifest.json --adjacency " + base + "/adjacency.csv --out " +
                        base + "/model",
                    log)
                .exit_code == 0);
    REQUIRE(run_cli("infer --manifest " + base + "/data/manifest.json --params " + base +
                        "/model/parameters.ncddp --out " + base + "/sims",
                    log)
                .exit_code == 0);
    REQUIRE(run_cli("evaluate --config " + config + " --manifest " + base +
                        "/data/manifest.json --similarity-dir " + base + "/sims --out " + base +
                        "/metrics.json",
                    log)
                .exit_code == 0);
  }
  CHECK(read_bytes(dir.str("a/model/parameters.ncddp")) ==
        read_bytes(dir.str("b/model/parameters.ncddp")));
  CHECK(read_bytes(dir.str("a/metrics.json")) == read_bytes(dir.str("b/metrics.json")));
  CHECK(read_bytes(dir.str("a/sims/similarity_000003.csv")) ==
        read_bytes(dir.str("b/sims/similarity_000003.csv")));
}

TEST_CASE("missing config keys are listed exhaustively with a usage exit code") {
  helpers::TempDir dir("cli_missing");
  const std::string config = dir.str("config.json");
  {
    std::ofstream out(config);
    out << R"({"domain": "time"})";
  }
  const auto r = run_cli("synth --config " + config + " --out " + dir.str("data"),
                         dir.str("log.txt"));
  CHECK(r.exit_code == 1);
  for (const char* key : {"synth.n_nodes", "t_len", "sampling_rate_hz", "synth.f1_hz", "seed"})
    CHECK_MESSAGE(r.output.find(key) != std::string::npos, r.output);
}

TEST_CASE("data errors exit with code 2") {
  helpers::TempDir dir("cli_data_err");
  const std::string config = dir.str("config.json");
  write_config(config);
  const auto r = run_cli("topology --config " + config + " --manifest " +
                             dir.str("no_such_manifest.json") + " --out " + dir.str("a.csv"),
                         dir.str("log.txt"));
  CHECK(r.exit_code == 2);
}

TEST_CASE("benchmark emits timing JSON") {
  helpers::TempDir dir("cli_bench");
  const std::string config = dir.str("config.json");
  write_config(config);
  const auto r = run_cli("benchmark --config " + config +
                             " --set benchmark.n_list=[4,8] --set benchmark.repeats=3"
                             " --set benchmark.n_eval_samples=40 --out " + dir.str("bench.json"),
                         dir.str("log.txt"));
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  std::ifstream in(dir.str("bench.json"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str().find("\"n_sweep\"") != std::string::npos);
  CHECK(buffer.str().find("seconds_per_sample") != std::string::npos);
}

TEST_CASE("bad usage exits with code 1") {
  helpers::TempDir dir("cli_usage");
  const auto r = run_cli("train", dir.str("log.txt"));  // required options missing
  CHECK(r.exit_code == 1);
  const auto r2 = run_cli("not_a_subcommand", dir.str("log.txt"));
  CHECK(r2.exit_code == 1);
}
