// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_LEARNERS_HPP_
#define TAUSELECT_LEARNERS_HPP_

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "tauselect/elastic_net.hpp"
#include "tauselect/gbt.hpp"

namespace tauselect {

enum class Family { elastic_net, gbt };

inline std::string to_string(Family f) { return f == Family::elastic_net ? "en" : "gbt"; }

/// One learning algorithm with pinned hyperparameters: lambda for the elastic
/// net, tree count for boosted trees.
struct AlgoSpec {
  Family family = Family::elastic_net;
  double lambda = 0.0;
  int tree_count = 0;

  std::string hyper() const {
    return family == Family::elastic_net ? format_double(lambda) : std::to_string(tree_count);
  }

  friend bool operator==(const AlgoSpec& a, const AlgoSpec& b) {
    if (a.family != b.family) return false;
    return a.family == Family::elastic_net ? a.lambda == b.lambda : a.tree_count == b.tree_count;
  }
};

struct EnParams {
  double alpha = 0.5;
  double tol = 1e-7;
  int max_sweeps = 10000;
};

struct GbtParams {
  int depth = 3;
  double shrinkage = 0.2;
  int min_node = 3;
};

/// 20 log-spaced penalties spanning [e^-5, e^2].
inline std::vector<double> default_lambda_grid(int count = 20) {
  check_arg(count >= 2, "default_lambda_grid: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    grid[static_cast<std::size_t>(k)] = std::exp(-5.0 + 7.0 * k / (count - 1));
  }
  return grid;
}

/// Tree counts spanning 1..500; evaluated as prefixes of one 500-tree fit.
inline std::vector<int> default_tree_count_grid() {
  return {1, 2, 5, 10, 25, 50, 100, 200, 350, 500};
}

/// The algorithm/hyperparameter grid shared by meta-learners and nuisance
/// estimation: elastic-net candidates first, then boosted-tree candidates.
struct CandidateGrid {
  std::vector<double> lambdas = default_lambda_grid();
  std::vector<int> tree_counts = default_tree_count_grid();
  EnParams en;
  GbtParams gbt;

  std::size_t size() const { return lambdas.size() + tree_counts.size(); }

  std::vector<AlgoSpec> specs() const {
    std::vector<AlgoSpec> out;
    out.reserve(size());
    for (double l : lambdas) out.push_back({Family::elastic_net, l, 0});
    for (int t : tree_counts) out.push_back({Family::gbt, 0.0, t});
    return out;
  }

  void validate() const {
    check_arg(!lambdas.empty() || !tree_counts.empty(), "CandidateGrid: empty grid");
    for (double l : lambdas) check_arg(l >= 0.0, "CandidateGrid: negative lambda");
    check_arg(std::is_sorted(tree_counts.begin(), tree_counts.end()),
              "CandidateGrid: tree_counts must ascend");
    for (int t : tree_counts) check_arg(t >= 1, "CandidateGrid: tree_count must be >= 1");
  }
};

using Regressor = std::variant<ElasticNetModel, TreeEnsemble>;

inline Vector predict(const Regressor& model, const Matrix& X) {
  return std::visit([&](const auto& m) { return m.predict(X); }, model);
}

/// Fits a single candidate from scratch.
inline Regressor fit_regressor(const Matrix& X, const Vector& y, const Vector& weights,
                               const AlgoSpec& spec, const EnParams& en = {},
                               const GbtParams& gbt = {}) {
  if (spec.family == Family::elastic_net) {
    return fit_elastic_net(X, y, weights, en.alpha, spec.lambda, en.tol, en.max_sweeps);
  }
  return fit_gbt(X, y, weights, spec.tree_count, gbt.depth, gbt.shrinkage, gbt.min_node);
}

/// All candidates of a grid fit on one regression problem: the elastic-net
/// path is fit with warm starts and the boosted trees once at the maximum
/// count, with smaller counts served as prefixes.
struct CandidateFit {
  std::vector<ElasticNetModel> en_models;  // aligned with grid.lambdas
  TreeEnsemble gbt_model;                  // fit at max tree count (absent if no tree candidates)
  std::vector<double> lambdas;
  std::vector<int> tree_counts;

  std::size_t size() const { return lambdas.size() + tree_counts.size(); }

  /// Predictions of every candidate on X, in grid order.
  std::vector<Vector> predict_all(const Matrix& X) const {
    std::vector<Vector> out;
    out.reserve(size());
    for (const auto& m : en_models) out.push_back(m.predict(X));
    if (!tree_counts.empty()) {
      auto gbt_preds = predict_prefixes(gbt_model, X, tree_counts);
      for (auto& p : gbt_preds) out.push_back(std::move(p));
    }
    return out;
  }

  /// Self-contained model for candidate k (boosted-tree candidates get a
  /// truncated copy of the shared ensemble).
  Regressor materialize(std::size_t k) const {
    if (k < en_models.size()) return en_models[k];
    const std::size_t t = k - en_models.size();
    check_arg(t < tree_counts.size(), "CandidateFit::materialize: index out of range");
    return gbt_model.prefix(tree_counts[t]);
  }
};

inline CandidateFit fit_candidate_set(const Matrix& X, const Vector& y, const Vector& weights,
                                      const CandidateGrid& grid) {
  grid.validate();
  CandidateFit fit;
  fit.lambdas = grid.lambdas;
  fit.tree_counts = grid.tree_counts;
  if (!grid.lambdas.empty()) {
    fit.en_models = fit_elastic_net_path(X, y, weights, grid.en.alpha, grid.lambdas, grid.en.tol,
                                         grid.en.max_sweeps);
  }
  if (!grid.tree_counts.empty()) {
    fit.gbt_model = fit_gbt(X, y, weights, grid.tree_counts.back(), grid.gbt.depth,
                            grid.gbt.shrinkage, grid.gbt.min_node);
  }
  return fit;
}

}  // namespace tauselect

#endif  // TAUSELECT_LEARNERS_HPP_
