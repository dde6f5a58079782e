#pragma once

#include <cstdint>
#include <vector>

#include "ncdd/rng.hpp"
#include "ncdd/types.hpp"

namespace ncdd {

/// Strict upper triangle of a similarity matrix plus the sample's state.
struct FeatureVector {
  Eigen::VectorXd values;  // length N(N-1)/2
  int label = 0;
};

/// Row-major strict upper triangle [S(0,1), S(0,2), ..., S(N-2,N-1)].
/// Throws AsymmetryError when max |S - S^T| > 1e-9.
Eigen::VectorXd vectorize_upper(const SimilarityMatrix& s);

struct ForestConfig {
  int n_trees = 1000;
  int max_depth = 0;          // 0 = unlimited
  int features_per_split = 0;  // 0 = floor(sqrt(M))
  int min_leaf = 1;
  RngSeed seed{1};
};

/// CART random forest: per-tree seeded bootstrap, Gini splits over a random
/// feature subset per node. Scores are the fraction of trees voting class 1.
class RandomForest {
 public:
  /// Throws SingleClassError unless both classes are present.
  static RandomForest train(const std::vector<FeatureVector>& data, const ForestConfig& config);

  double score(const Eigen::VectorXd& features) const;
  double tree_vote(int tree, const Eigen::VectorXd& features) const;
  int n_trees() const { return static_cast<int>(trees_.size()); }
  int n_features() const { return n_features_; }

 private:
  struct Node {
    int feature = -1;        // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double vote = 0.0;       // leaf majority vote; 0.5 on an exact tie
  };
  using Tree = std::vector<Node>;

  std::vector<Tree> trees_;
  int n_features_ = 0;
};

/// Mann-Whitney pair statistic: fraction of (positive, negative) score pairs
/// won by the positive, ties counted 1/2. Throws SingleClassError.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Per class, sorted by (timestamp, position): first ceil(n/2) indices go to
/// train, the rest to test. Returned index lists are in chronological order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> chronological_split(
    const std::vector<std::int64_t>& timestamps, const std::vector<int>& labels);

/// Keeps every class-1 index and a seeded uniform subset of class-0 indices of
/// size at most ratio * (class-1 count). Result is sorted by position.
std::vector<std::size_t> subsample_majority(const std::vector<int>& labels, double ratio, Rng& rng);

}  // namespace ncdd
