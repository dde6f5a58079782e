#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>

#include "ncdd/rng.hpp"
#include "ncdd/types.hpp"

namespace helpers {

inline Eigen::MatrixXd random_matrix(int rows, int cols, ncdd::Rng& rng, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

inline ncdd::GraphSignalSample random_sample(int n, int t, ncdd::Rng& rng, double lo = -1.0,
                                             double hi = 1.0) {
  ncdd::GraphSignalSample sample;
  sample.values = random_matrix(n, t, rng, lo, hi);
  return sample;
}

inline ncdd::Topology random_topology(int n, ncdd::Rng& rng, double edge_prob = 0.5) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < edge_prob) edges.emplace_back(u, v);
  return ncdd::Topology::from_edges(n, edges);
}

// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    const auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / ("ncdd_" + tag + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp dir");
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const {
    return leaf.empty() ? path_.string() : (path_ / leaf).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace helpers
