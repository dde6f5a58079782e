// Command-line pipeline: synthetic data -> topology -> training -> per-sample
// similarity graphs -> random-forest state classification, plus an inference
// timing benchmark. Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "config_util.hpp"
#include "ncdd/data_io.hpp"
#include "ncdd/evaluation.hpp"
#include "ncdd/perf.hpp"
#include "ncdd/synthdata.hpp"
#include "ncdd/topology.hpp"
#include "ncdd/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ncdd;

namespace {

constexpr std::uint64_t kSubsampleStream = 21;
constexpr std::uint64_t kForestStream = 22;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--set", args.overrides, "Override a config key (key=value, repeatable)");
}

SynthConfig synth_config(cli::Config& config) {
  SynthConfig synth;
  synth.n_nodes = config.get<int>("synth.n_nodes");
  synth.t_len = config.get<int>("t_len");
  synth.n_samples_per_state = config.get<int>("synth.n_samples_per_state");
  synth.sampling_rate_hz = config.get<double>("sampling_rate_hz");
  synth.ar_coefficient = config.get<double>("synth.ar_coefficient");
  synth.noise_sigma = config.get<double>("synth.noise_sigma");
  synth.f1_hz = config.get<double>("synth.f1_hz");
  synth.coupling = config.get<double>("synth.coupling");
  synth.coupled_nodes = config.get_or<std::vector<int>>("synth.coupled_nodes", {});
  synth.seed = RngSeed{config.get<std::uint64_t>("seed")};
  config.check_required();
  return synth;
}

ModelSpec model_spec(cli::Config& config, const DatasetManifest& manifest) {
  const Domain domain = cli::parse_domain(config.get<std::string>("domain"));
  const int k = config.get<int>("k_iterations");
  const AggregatorKind aggregator = cli::parse_aggregator(config.get<std::string>("aggregator"));
  const Activation activation = cli::parse_activation(config.get<std::string>("activation"));
  const ParamMode theta_mode = cli::parse_mode(config.get<std::string>("theta_mode"));
  const ParamMode psi_mode = cli::parse_mode(config.get<std::string>("psi_mode"));
  const double cn_epsilon = config.get_or<double>("cn_epsilon", 1e-12);
  FeatureConfig features;
  if (domain == Domain::kTime) {
    features = FeatureConfig::time_domain();
  } else {
    const int inner = config.get<int>("inner_windows");
    const int bins = config.get<int>("frequency_bins");
    config.check_required();
    features =
        FeatureConfig::frequency_domain(inner, bins, manifest.sampling_rate_hz, manifest.t_len);
  }
  config.check_required();
  return make_model_spec(features, manifest.t_len, k, aggregator, activation, theta_mode,
                         psi_mode, BandEdges::physiological(), cn_epsilon);
}

// The training subset: majority subsampling, then the chronological first
// half of each class.
std::vector<std::size_t> training_subset(const std::vector<GraphSignalSample>& samples,
                                         double ratio, RngSeed seed) {
  std::vector<int> labels;
  std::vector<std::int64_t> timestamps;
  for (const GraphSignalSample& sample : samples) {
    labels.push_back(sample.label.value_or(0));
    timestamps.push_back(sample.timestamp.value_or(sample.sample_index));
  }
  Rng rng(derive_seed(seed, kSubsampleStream));
  const std::vector<std::size_t> kept = subsample_majority(labels, ratio, rng);
  std::vector<int> kept_labels;
  std::vector<std::int64_t> kept_times;
  for (std::size_t i : kept) {
    kept_labels.push_back(labels[i]);
    kept_times.push_back(timestamps[i]);
  }
  const auto [train, test] = chronological_split(kept_times, kept_labels);
  std::vector<std::size_t> subset;
  for (std::size_t i : train) subset.push_back(kept[i]);
  return subset;
}

std::vector<GraphSignalSample> select_samples(const std::vector<GraphSignalSample>& samples,
                                              cli::Config& config, const std::string& split) {
  if (split == "full") return samples;
  if (split != "train")
    fail(ErrorCode::kUsage, "--split must be 'train' or 'full', got '" + split + "'");
  const double ratio = config.get_or<double>("subsample_ratio", 10.0);
  const RngSeed seed{config.get<std::uint64_t>("seed")};
  config.check_required();
  std::vector<GraphSignalSample> subset;
  for (std::size_t i : training_subset(samples, ratio, seed)) subset.push_back(samples[i]);
  return subset;
}

std::string similarity_path(const std::string& dir, std::size_t index) {
  char name[64];
  std::snprintf(name, sizeof(name), "similarity_%06zu.csv", index);
  return (fs::path(dir) / name).string();
}

int run_synth(cli::Config& config, const std::string& out_dir) {
  const SynthConfig synth = synth_config(config);
  const std::vector<GraphSignalSample> samples = generate(synth);
  write_dataset(out_dir, samples, synth.sampling_rate_hz);
  std::cout << "wrote " << samples.size() << " samples to " << out_dir << "\n";
  return 0;
}

int run_topology(cli::Config& config, const std::string& manifest_path, const std::string& out,
                 const std::string& split) {
  const std::vector<GraphSignalSample> samples = read_dataset(manifest_path);
  const std::vector<GraphSignalSample> subset = select_samples(samples, config, split);
  TopologyConfig topo_config;
  topo_config.eta_ratio = config.get<double>("eta_ratio");
  topo_config.regularization_epsilon = config.get_or<double>("regularization_epsilon", 1e-8);
  config.check_required();
  const Topology topology = infer_topology(subset, topo_config);
  write_adjacency(out, topology);
  std::cout << "adjacency with " << (topology.adjacency().sum() - topology.n_nodes()) / 2
            << " edges written to " << out << "\n";
  return 0;
}

int run_train(cli::Config& config, const std::string& manifest_path,
              const std::string& adjacency_path, const std::string& out_dir,
              const std::string& split) {
  DatasetManifest manifest;
  const std::vector<GraphSignalSample> samples = read_dataset(manifest_path, &manifest);
  const std::vector<GraphSignalSample> subset = select_samples(samples, config, split);
  const Topology topology = read_adjacency(adjacency_path);
  const ModelSpec spec = model_spec(config, manifest);

  TrainConfig train_config;
  train_config.epochs = config.get<int>("epochs");
  train_config.learning_rate = config.get<double>("learning_rate");
  train_config.batch_size = config.get<int>("batch_size");
  train_config.seed = RngSeed{config.get<std::uint64_t>("seed")};
  config.check_required();
  if (train_config.batch_size > static_cast<int>(subset.size())) {
    train_config.batch_size = static_cast<int>(subset.size());
    std::cout << "note: batch_size clamped to the " << subset.size() << " selected samples\n";
  }

  const TrainResult result = sgd_train(subset, topology, spec, train_config);
  fs::create_directories(out_dir);
  write_parameters((fs::path(out_dir) / "parameters.ncddp").string(), result.params, topology);
  write_loss_trace((fs::path(out_dir) / "loss_trace.csv").string(), result.epoch_mean_loss);
  std::cout << "trained " << result.params.free_variables().size() << " free variables over "
            << subset.size() << " samples; final mean loss " << result.epoch_mean_loss.back()
            << "\n";
  return 0;
}

int run_infer(const std::string& manifest_path, const std::string& params_path,
              const std::string& out_dir) {
  const auto [params, topology] = read_parameters(params_path);
  const std::vector<GraphSignalSample> samples = read_dataset(manifest_path);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SimilarityMatrix s = infer_similarity(samples[i], topology, params);
    write_similarity(similarity_path(out_dir, i), s);
  }
  std::cout << "wrote " << samples.size() << " similarity matrices to " << out_dir << "\n";
  return 0;
}

int run_evaluate(cli::Config& config, const std::string& manifest_path,
                 const std::string& similarity_dir, const std::string& out_path,
                 bool write_scores) {
  DatasetManifest manifest;
  read_dataset(manifest_path, &manifest);  // validates shapes
  std::vector<int> labels;
  std::vector<std::int64_t> timestamps;
  for (const DatasetManifest::Entry& entry : manifest.entries) {
    labels.push_back(entry.label);
    timestamps.push_back(entry.timestamp);
  }

  const double ratio = config.get_or<double>("subsample_ratio", 10.0);
  const RngSeed seed{config.get<std::uint64_t>("seed")};
  ForestConfig forest_config;
  forest_config.n_trees = config.get<int>("n_trees");
  forest_config.max_depth = config.get_or<int>("max_depth", 0);
  forest_config.features_per_split = config.get_or<int>("features_per_split", 0);
  forest_config.min_leaf = config.get_or<int>("min_leaf", 1);
  forest_config.seed = derive_seed(seed, kForestStream);
  config.check_required();

  Rng subsample_rng(derive_seed(seed, kSubsampleStream));
  const std::vector<std::size_t> kept = subsample_majority(labels, ratio, subsample_rng);
  std::vector<int> kept_labels;
  std::vector<std::int64_t> kept_times;
  for (std::size_t i : kept) {
    kept_labels.push_back(labels[i]);
    kept_times.push_back(timestamps[i]);
  }
  const auto [train_local, test_local] = chronological_split(kept_times, kept_labels);

  const auto load_features = [&](std::size_t original_index) {
    return vectorize_upper(read_similarity(similarity_path(similarity_dir, original_index)));
  };

  std::vector<FeatureVector> train_data;
  for (std::size_t local : train_local)
    train_data.push_back(FeatureVector{load_features(kept[local]), kept_labels[local]});
  const RandomForest forest = RandomForest::train(train_data, forest_config);

  std::vector<double> test_scores;
  std::vector<int> test_labels;
  for (std::size_t local : test_local) {
    test_scores.push_back(forest.score(load_features(kept[local])));
    test_labels.push_back(kept_labels[local]);
  }
  const double auc_value = auc(test_scores, test_labels);

  int train_pos = 0, test_pos = 0;
  for (std::size_t local : train_local) train_pos += kept_labels[local];
  for (int label : test_labels) test_pos += label;

  json metrics;
  metrics["format"] = "ncdd-metrics";
  metrics["version"] = 1;
  metrics["auc"] = auc_value;
  metrics["n_train"] = train_local.size();
  metrics["n_test"] = test_local.size();
  metrics["train_class_counts"] = {{"state0", train_local.size() - train_pos},
                                   {"state1", train_pos}};
  metrics["test_class_counts"] = {{"state0", test_local.size() - test_pos}, {"state1", test_pos}};
  metrics["config"] = config.document();

  std::ofstream out(out_path);
  if (!out) fail(ErrorCode::kParse, "cannot open '" + out_path + "' for writing");
  out << metrics.dump(2) << '\n';

  if (write_scores) {
    const fs::path scores_path = fs::path(out_path).parent_path() / "scores.csv";
    std::ofstream scores(scores_path);
    if (!scores) fail(ErrorCode::kParse, "cannot write " + scores_path.string());
    scores << "sample_index,timestamp,label,split,score\n";
    for (std::size_t local : train_local)
      scores << kept[local] << ',' << kept_times[local] << ',' << kept_labels[local] << ",train,"
             << forest.score(load_features(kept[local])) << '\n';
    std::size_t t = 0;
    for (std::size_t local : test_local)
      scores << kept[local] << ',' << kept_times[local] << ',' << kept_labels[local] << ",test,"
             << test_scores[t++] << '\n';
  }

  std::cout << "AUC " << auc_value << " over " << test_local.size() << " test samples\n";
  return 0;
}

int run_benchmark(cli::Config& config, const std::string& out_path) {
  PerfConfig perf;
  perf.t_len = config.get_or<int>("benchmark.t_len", 50);
  perf.n_eval_samples = config.get_or<int>("benchmark.n_eval_samples", 100);
  perf.repeats = config.get_or<int>("benchmark.repeats", 7);
  perf.seed = RngSeed{config.get<std::uint64_t>("seed")};
  const auto n_list = config.get<std::vector<int>>("benchmark.n_list");
  const auto i_list = config.get_or<std::vector<int>>("benchmark.i_list", {});
  const int i_fixed = config.get_or<int>("benchmark.train_set_size", 100);
  const int n_fixed = config.get_or<int>("benchmark.i_sweep_nodes", 25);
  config.check_required();

  json doc;
  doc["format"] = "ncdd-benchmark";
  doc["version"] = 1;
  json n_sweep = json::array();
  for (const PerfPoint& point : sweep_nodes(n_list, i_fixed, perf)) {
    n_sweep.push_back({{"n_nodes", point.n_nodes},
                       {"train_set_size", point.train_set_size},
                       {"seconds_per_sample", point.seconds_per_sample}});
    std::cout << "N=" << point.n_nodes << "  " << point.seconds_per_sample << " s/sample\n";
  }
  doc["n_sweep"] = std::move(n_sweep);
  if (!i_list.empty()) {
    json i_sweep = json::array();
    for (const PerfPoint& point : sweep_train_size(n_fixed, i_list, perf)) {
      i_sweep.push_back({{"n_nodes", point.n_nodes},
                         {"train_set_size", point.train_set_size},
                         {"seconds_per_sample", point.seconds_per_sample}});
      std::cout << "I=" << point.train_set_size << "  " << point.seconds_per_sample
                << " s/sample\n";
    }
    doc["i_sweep"] = std::move(i_sweep);
  }
  doc["config"] = config.document();
  std::ofstream out(out_path);
  if (!out) fail(ErrorCode::kParse, "cannot open '" + out_path + "' for writing");
  out << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Node-centric graph learning pipeline"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string manifest_path, adjacency_path, params_path, similarity_dir, out, split = "train";

  CLI::App* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  add_common(synth, common);
  synth->add_option("--out", out, "Output dataset directory")->required();

  CLI::App* topology = app.add_subcommand("topology", "Infer the adjacency from samples");
  add_common(topology, common);
  topology->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  topology->add_option("--out", out, "Adjacency file")->required();
  topology->add_option("--split", split, "Sample subset: train (default) or full");

  CLI::App* train = app.add_subcommand("train", "Learn shared parameters by mini-batch SGD");
  add_common(train, common);
  train->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  train->add_option("--adjacency", adjacency_path, "Adjacency file")->required();
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--split", split, "Sample subset: train (default) or full");

  CLI::App* infer = app.add_subcommand("infer", "Closed-form similarity matrices per sample");
  add_common(infer, common);
  infer->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  infer->add_option("--params", params_path, "Parameter file")->required();
  infer->add_option("--out", out, "Output directory")->required();

  CLI::App* classify = app.add_subcommand("classify", "Forest scores plus metrics JSON");
  add_common(classify, common);
  classify->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  classify->add_option("--similarity-dir", similarity_dir, "Directory from `infer`")->required();
  classify->add_option("--out", out, "Metrics JSON path")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "Train forest on the first half, AUC on the second");
  add_common(evaluate, common);
  evaluate->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  evaluate->add_option("--similarity-dir", similarity_dir, "Directory from `infer`")->required();
  evaluate->add_option("--out", out, "Metrics JSON path")->required();

  CLI::App* benchmark = app.add_subcommand("benchmark", "Per-sample inference wall-time sweeps");
  add_common(benchmark, common);
  benchmark->add_option("--out", out, "Benchmark JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems exit 1; --help exits 0
  }

  try {
    cli::Config config = cli::Config::load(common.config_path, common.overrides);
    if (synth->parsed()) return run_synth(config, out);
    if (topology->parsed()) return run_topology(config, manifest_path, out, split);
    if (train->parsed()) return run_train(config, manifest_path, adjacency_path, out, split);
    if (infer->parsed()) return run_infer(manifest_path, params_path, out);
    if (classify->parsed()) return run_evaluate(config, manifest_path, similarity_dir, out, true);
    if (evaluate->parsed()) return run_evaluate(config, manifest_path, similarity_dir, out, false);
    if (benchmark->parsed()) return run_benchmark(config, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
