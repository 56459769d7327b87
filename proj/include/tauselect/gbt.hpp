// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_GBT_HPP_
#define TAUSELECT_GBT_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "tauselect/common.hpp"

namespace tauselect {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf value: weighted mean residual
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(const Matrix& X, Index i) const {
    int k = 0;
    while (nodes[static_cast<std::size_t>(k)].feature >= 0) {
      const TreeNode& nd = nodes[static_cast<std::size_t>(k)];
      k = X(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(k)].value;
  }
};

/// Stagewise least-squares boosting ensemble. Prediction with k trees uses
/// exactly the first k trees, so one deep fit serves a whole tree-count grid.
struct TreeEnsemble {
  std::vector<RegressionTree> trees;
  double shrinkage = 0.2;
  double base_prediction = 0.0;
  int min_node = 3;
  int max_depth = 3;
  Index n_features = 0;

  Vector predict(const Matrix& X, int tree_count = -1) const {
    check_arg(X.cols() == n_features, "TreeEnsemble::predict: feature count mismatch");
    if (tree_count < 0) tree_count = static_cast<int>(trees.size());
    check_arg(tree_count <= static_cast<int>(trees.size()),
              "TreeEnsemble::predict: tree_count exceeds fitted trees");
    Vector out = Vector::Constant(X.rows(), base_prediction);
    for (int t = 0; t < tree_count; ++t) {
      for (Index i = 0; i < X.rows(); ++i) out[i] += shrinkage * trees[t].predict_row(X, i);
    }
    return out;
  }

  /// Ensemble truncated to the first k trees.
  TreeEnsemble prefix(int k) const {
    check_arg(k >= 0 && k <= static_cast<int>(trees.size()), "TreeEnsemble::prefix: bad length");
    TreeEnsemble out = *this;
    out.trees.assign(trees.begin(), trees.begin() + k);
    return out;
  }
};

/// One pass over the trees evaluating every prefix length in `counts`
/// (ascending). Returns one prediction vector per count.
inline std::vector<Vector> predict_prefixes(const TreeEnsemble& model, const Matrix& X,
                                            const std::vector<int>& counts) {
  check_arg(std::is_sorted(counts.begin(), counts.end()), "predict_prefixes: counts must ascend");
  check_arg(counts.empty() || counts.back() <= static_cast<int>(model.trees.size()),
            "predict_prefixes: count exceeds fitted trees");
  check_arg(X.cols() == model.n_features, "predict_prefixes: feature count mismatch");
  std::vector<Vector> out;
  out.reserve(counts.size());
  Vector acc = Vector::Constant(X.rows(), model.base_prediction);
  std::size_t next = 0;
  while (next < counts.size() && counts[next] == 0) {
    out.push_back(acc);
    ++next;
  }
  for (int t = 0; t < static_cast<int>(model.trees.size()) && next < counts.size(); ++t) {
    for (Index i = 0; i < X.rows(); ++i) acc[i] += model.shrinkage * model.trees[t].predict_row(X, i);
    while (next < counts.size() && counts[next] == t + 1) {
      out.push_back(acc);
      ++next;
    }
  }
  return out;
}

namespace detail {

// Tree builder working on per-feature row lists kept sorted by feature value.
// Split thresholds are midpoints between consecutive distinct values; the
// best split maximizes weighted SSE reduction with ties broken by lowest
// feature index, then lowest threshold.
struct TreeBuilder {
  const Matrix& X;
  const Vector& weights;
  const Vector& residual;
  int min_node;
  double shrinkage;
  Vector& predictions;  // running boosted predictions, updated at leaves

  RegressionTree tree;

  struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  int build(const std::vector<std::vector<int>>& sorted_rows, int depth_left) {
    const std::vector<int>& rows = sorted_rows[0];
    double sum_w = 0.0;
    double sum_wr = 0.0;
    for (int i : rows) {
      sum_w += weights[i];
      sum_wr += weights[i] * residual[i];
    }
    const double node_value = sum_w > 0.0 ? sum_wr / sum_w : 0.0;

    SplitChoice best;
    if (depth_left > 0 && static_cast<int>(rows.size()) >= 2 * min_node) {
      const double parent_score = sum_w > 0.0 ? sum_wr * sum_wr / sum_w : 0.0;
      for (std::size_t f = 0; f < sorted_rows.size(); ++f) {
        const std::vector<int>& order = sorted_rows[f];
        double left_w = 0.0;
        double left_wr = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
          const int i = order[k];
          left_w += weights[i];
          left_wr += weights[i] * residual[i];
          const double v = X(i, static_cast<Index>(f));
          const double v_next = X(order[k + 1], static_cast<Index>(f));
          if (v == v_next) continue;  // not a value boundary
          const std::size_t left_count = k + 1;
          const std::size_t right_count = order.size() - left_count;
          if (left_count < static_cast<std::size_t>(min_node) ||
              right_count < static_cast<std::size_t>(min_node)) {
            continue;
          }
          const double right_w = sum_w - left_w;
          const double right_wr = sum_wr - left_wr;
          if (left_w <= 0.0 || right_w <= 0.0) continue;
          const double gain =
              left_wr * left_wr / left_w + right_wr * right_wr / right_w - parent_score;
          if (gain > best.gain) {
            best.gain = gain;
            best.feature = static_cast<int>(f);
            best.threshold = v + 0.5 * (v_next - v);
          }
        }
      }
    }

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (best.feature < 0) {
      tree.nodes[node_id].value = node_value;
      for (int i : rows) predictions[i] += shrinkage * node_value;
      return node_id;
    }

    tree.nodes[node_id].feature = best.feature;
    tree.nodes[node_id].threshold = best.threshold;
    std::vector<std::vector<int>> left_rows(sorted_rows.size());
    std::vector<std::vector<int>> right_rows(sorted_rows.size());
    for (std::size_t f = 0; f < sorted_rows.size(); ++f) {
      for (int i : sorted_rows[f]) {
        if (X(i, best.feature) <= best.threshold) {
          left_rows[f].push_back(i);
        } else {
          right_rows[f].push_back(i);
        }
      }
    }
    tree.nodes[node_id].left = build(left_rows, depth_left - 1);
    tree.nodes[node_id].right = build(right_rows, depth_left - 1);
    return node_id;
  }
};

}  // namespace detail

/// Fits `n_trees` regression trees by stagewise least squares: each tree fits
/// the current weighted residuals, and predictions accumulate
/// base_prediction + shrinkage * sum of tree outputs.
inline TreeEnsemble fit_gbt(const Matrix& X, const Vector& y, const Vector& weights, int n_trees,
                            int depth, double shrinkage, int min_node) {
  const Index n = X.rows();
  check_arg(min_node >= 1, "fit_gbt: min_node must be >= 1");
  check_arg(n >= 2 * static_cast<Index>(min_node), "fit_gbt: fewer rows than 2*min_node");
  check_arg(y.size() == n && weights.size() == n, "fit_gbt: size mismatch");
  check_arg(n_trees >= 1, "fit_gbt: n_trees must be >= 1");
  check_arg(depth >= 1, "fit_gbt: depth must be >= 1");
  check_arg(shrinkage > 0.0 && shrinkage <= 1.0, "fit_gbt: shrinkage must be in (0,1]");
  check_arg(X.allFinite() && y.allFinite() && weights.allFinite(), "fit_gbt: non-finite inputs");
  check_arg((weights.array() >= 0.0).all(), "fit_gbt: negative weights");
  const double wsum = weights.sum();
  check_arg(wsum > 0.0, "fit_gbt: all weights are zero");

  TreeEnsemble model;
  model.shrinkage = shrinkage;
  model.min_node = min_node;
  model.max_depth = depth;
  model.n_features = X.cols();
  model.base_prediction = weights.dot(y) / wsum;

  // Sort order by feature value is residual-independent: compute once.
  std::vector<std::vector<int>> presorted(static_cast<std::size_t>(X.cols()));
  for (Index f = 0; f < X.cols(); ++f) {
    auto& order = presorted[static_cast<std::size_t>(f)];
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (X(a, f) != X(b, f)) return X(a, f) < X(b, f);
      return a < b;
    });
  }

  Vector predictions = Vector::Constant(n, model.base_prediction);
  Vector residual(n);
  model.trees.reserve(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    residual = y - predictions;
    detail::TreeBuilder builder{X, weights, residual, min_node, shrinkage, predictions, {}};
    builder.build(presorted, depth);
    model.trees.push_back(std::move(builder.tree));
  }
  return model;
}

}  // namespace tauselect

#endif  // TAUSELECT_GBT_HPP_
