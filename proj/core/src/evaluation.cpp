#include "ncdd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncdd/error.hpp"

namespace ncdd {

Eigen::VectorXd vectorize_upper(const SimilarityMatrix& s) {
  const int n = s.n_nodes();
  if (s.values.cols() != n) fail(ErrorCode::kDimensionMismatch, "similarity matrix must be square");
  if (asymmetry(s.values) > 1e-9)
    fail(ErrorCode::kAsymmetry, "similarity matrix is not symmetric");
  Eigen::VectorXd out(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  Eigen::Index i = 0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) out(i++) = s.values(u, v);
  return out;
}

namespace {

constexpr double kMinGiniGain = 1e-12;

struct SplitResult {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

// Best Gini split of `rows` over the candidate features; -1 feature when no
// candidate produces a gain.
SplitResult best_split(const std::vector<FeatureVector>& data, const std::vector<int>& rows,
                       const std::vector<std::size_t>& candidates, int min_leaf) {
  SplitResult best;
  const double total = static_cast<double>(rows.size());
  double total_pos = 0.0;
  for (int r : rows) total_pos += data[static_cast<std::size_t>(r)].label;
  const double parent = gini(total_pos, total);

  std::vector<std::pair<double, int>> values(rows.size());
  for (std::size_t f_idx = 0; f_idx < candidates.size(); ++f_idx) {
    const auto feature = static_cast<Eigen::Index>(candidates[f_idx]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& fv = data[static_cast<std::size_t>(rows[i])];
      values[i] = {fv.values(feature), fv.label};
    }
    std::sort(values.begin(), values.end());

    double left_n = 0.0, left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      left_n += 1.0;
      left_pos += values[i].second;
      if (values[i].first == values[i + 1].first) continue;  // not a boundary
      const double right_n = total - left_n;
      if (left_n < min_leaf || right_n < min_leaf) continue;
      const double right_pos = total_pos - left_pos;
      const double child =
          (left_n * gini(left_pos, left_n) + right_n * gini(right_pos, right_n)) / total;
      const double gain = parent - child;
      // Ties keep the first candidate in iteration order (deterministic).
      if (gain > kMinGiniGain && gain > best.gain) {
        best.feature = static_cast<int>(candidates[f_idx]);
        best.threshold = 0.5 * (values[i].first + values[i + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

}  // namespace

RandomForest RandomForest::train(const std::vector<FeatureVector>& data,
                                 const ForestConfig& config) {
  if (data.empty()) fail(ErrorCode::kSingleClass, "no training samples");
  if (config.n_trees < 1) fail(ErrorCode::kConfigError, "n_trees must be >= 1");
  const int m = static_cast<int>(data[0].values.size());
  int n_pos = 0;
  for (const FeatureVector& fv : data) {
    if (static_cast<int>(fv.values.size()) != m)
      fail(ErrorCode::kDimensionMismatch, "inconsistent feature lengths");
    if (fv.label != 0 && fv.label != 1) fail(ErrorCode::kConfigError, "labels must be 0 or 1");
    n_pos += fv.label;
  }
  if (n_pos == 0 || n_pos == static_cast<int>(data.size()))
    fail(ErrorCode::kSingleClass, "training data contains a single class");

  const int features_per_split =
      config.features_per_split > 0
          ? std::min(config.features_per_split, m)
          : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(m)))));
  const int min_leaf = std::max(1, config.min_leaf);
  const std::size_t n = data.size();

  RandomForest forest;
  forest.n_features_ = m;
  forest.trees_.reserve(static_cast<std::size_t>(config.n_trees));
  const Rng base(config.seed);

  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng = base.child(static_cast<std::uint64_t>(t));
    std::vector<int> rows(n);
    for (std::size_t i = 0; i < n; ++i)
      rows[i] = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));

    Tree tree;
    // Iterative growth; each work item owns its row subset.
    struct Item {
      std::vector<int> rows;
      int node;
      int depth;
    };
    tree.push_back(Node{});
    std::vector<Item> stack;
    stack.push_back({std::move(rows), 0, 0});
    while (!stack.empty()) {
      Item item = std::move(stack.back());
      stack.pop_back();

      double pos = 0.0;
      for (int r : item.rows) pos += data[static_cast<std::size_t>(r)].label;
      const double total = static_cast<double>(item.rows.size());
      Node& node = tree[static_cast<std::size_t>(item.node)];
      node.vote = pos * 2.0 > total ? 1.0 : (pos * 2.0 < total ? 0.0 : 0.5);

      const bool pure = pos == 0.0 || pos == total;
      const bool too_deep = config.max_depth > 0 && item.depth >= config.max_depth;
      if (pure || too_deep || static_cast<int>(item.rows.size()) < 2 * min_leaf) continue;

      const std::vector<std::size_t> candidates = sample_without_replacement(
          static_cast<std::size_t>(m), static_cast<std::size_t>(features_per_split), rng);
      const SplitResult split = best_split(data, item.rows, candidates, min_leaf);
      if (split.feature < 0) continue;

      std::vector<int> left_rows, right_rows;
      for (int r : item.rows) {
        if (data[static_cast<std::size_t>(r)].values(split.feature) <= split.threshold)
          left_rows.push_back(r);
        else
          right_rows.push_back(r);
      }
      const int left = static_cast<int>(tree.size());
      tree.push_back(Node{});
      const int right = static_cast<int>(tree.size());
      tree.push_back(Node{});
      Node& parent = tree[static_cast<std::size_t>(item.node)];
      parent.feature = split.feature;
      parent.threshold = split.threshold;
      parent.left = left;
      parent.right = right;
      stack.push_back({std::move(right_rows), right, item.depth + 1});
      stack.push_back({std::move(left_rows), left, item.depth + 1});
    }
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

double RandomForest::tree_vote(int tree, const Eigen::VectorXd& features) const {
  if (features.size() != n_features_)
    fail(ErrorCode::kDimensionMismatch, "feature vector length does not match the forest");
  const Tree& t = trees_[static_cast<std::size_t>(tree)];
  int node = 0;
  while (t[static_cast<std::size_t>(node)].feature >= 0) {
    const Node& nd = t[static_cast<std::size_t>(node)];
    node = features(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return t[static_cast<std::size_t>(node)].vote;
}

double RandomForest::score(const Eigen::VectorXd& features) const {
  double total = 0.0;
  for (int t = 0; t < n_trees(); ++t) total += tree_vote(t, features);
  return total / static_cast<double>(n_trees());
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    fail(ErrorCode::kDimensionMismatch, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) fail(ErrorCode::kConfigError, "labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(label);
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(ErrorCode::kSingleClass, "both classes must be present");

  // Midrank form of the pair statistic: ties contribute exactly 1/2.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u_stat =
      rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u_stat / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> chronological_split(
    const std::vector<std::int64_t>& timestamps, const std::vector<int>& labels) {
  if (timestamps.size() != labels.size())
    fail(ErrorCode::kDimensionMismatch, "timestamps and labels differ in length");
  std::vector<std::size_t> train, test;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return timestamps[a] != timestamps[b] ? timestamps[a] < timestamps[b] : a < b;
    });
    const std::size_t n_train = (members.size() + 1) / 2;  // ceil
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < n_train ? train : test).push_back(members[i]);
  }
  const auto by_time = [&](std::size_t a, std::size_t b) {
    return timestamps[a] != timestamps[b] ? timestamps[a] < timestamps[b] : a < b;
  };
  std::sort(train.begin(), train.end(), by_time);
  std::sort(test.begin(), test.end(), by_time);
  return {std::move(train), std::move(test)};
}

std::vector<std::size_t> subsample_majority(const std::vector<int>& labels, double ratio,
                                            Rng& rng) {
  if (!(ratio > 0.0)) fail(ErrorCode::kConfigError, "subsample ratio must be positive");
  std::vector<std::size_t> minority, majority;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? minority : majority).push_back(i);
  const auto cap = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(minority.size()) + 1e-9));

  std::vector<std::size_t> kept = minority;
  if (majority.size() <= cap) {
    kept.insert(kept.end(), majority.begin(), majority.end());
  } else {
    for (std::size_t pick : sample_without_replacement(majority.size(), cap, rng))
      kept.push_back(majority[pick]);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace ncdd
