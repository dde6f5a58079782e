#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ncdd/training.hpp"
#include "ncdd/types.hpp"

namespace ncdd {

/// Dataset description: sample CSV paths (relative to the manifest directory)
/// with labels and timestamps. JSON document, format tag "ncdd-dataset" v1.
struct DatasetManifest {
  int n_nodes = 0;
  int t_len = 0;
  double sampling_rate_hz = 0.0;

  struct Entry {
    std::string path;
    int label = 0;
    std::int64_t timestamp = 0;
  };
  std::vector<Entry> entries;
};

/// Cuts a continuous recording into windows of window_s seconds with
/// overlap_s seconds of overlap; windows that would run past the end are
/// dropped. Sample counts must be integral (ConfigError otherwise).
std::vector<GraphSignalSample> window_recording(const Eigen::MatrixXd& recording, double window_s,
                                                double overlap_s, double rate_hz);

/// Plain CSV, one row per node, shortest round-trip number formatting.
void write_sample_csv(const std::string& path, const Eigen::MatrixXd& values);
Eigen::MatrixXd read_sample_csv(const std::string& path);

/// Text matrix file: header line "ncdd-matrix v1 <rows> <cols>", then CSV
/// rows. Round-trips doubles exactly. Throws VersionMismatch / ParseError.
void write_matrix(const std::string& path, const Eigen::MatrixXd& values);
Eigen::MatrixXd read_matrix(const std::string& path);

void write_similarity(const std::string& path, const SimilarityMatrix& s);
SimilarityMatrix read_similarity(const std::string& path);

void write_adjacency(const std::string& path, const Topology& topology);
Topology read_adjacency(const std::string& path);

void write_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);

/// Reads the manifest and every referenced sample, validating shapes.
/// Sample i carries the entry's label and timestamp and sample_index = i.
std::vector<GraphSignalSample> read_dataset(const std::string& manifest_path,
                                            DatasetManifest* manifest_out = nullptr);

/// Writes manifest plus per-sample CSVs under dir/samples/.
void write_dataset(const std::string& dir, const std::vector<GraphSignalSample>& samples,
                   double sampling_rate_hz);

/// Versioned binary parameter file (magic "NCDDPRM1", little-endian):
/// model header, the adjacency the parameters were trained against, then the
/// flat free-variable array as 64-bit floats. Layout documented in README.
void write_parameters(const std::string& path, const TrainableParameters& params,
                      const Topology& topology);
std::pair<TrainableParameters, Topology> read_parameters(const std::string& path);

/// CSV "epoch,mean_loss".
void write_loss_trace(const std::string& path, const std::vector<double>& epoch_mean_loss);
std::vector<double> read_loss_trace(const std::string& path);

}  // namespace ncdd
