// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_MATCHING_HPP_
#define TAUSELECT_MATCHING_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "tauselect/dataset.hpp"

namespace tauselect {

/// Cross-arm 1-nearest-neighbor assignment under Mahalanobis distance,
/// matching with replacement.
struct MatchAssignment {
  std::vector<Index> partner;  // partner[i] has the opposite treatment of i
  Vector distance;             // Mahalanobis distance to the partner
};

/// For each row, the closest opposite-arm row by Mahalanobis distance under
/// the pooled sample covariance, regularized by ridge_scale * trace/d on the
/// diagonal. Ties break to the lowest row index.
inline MatchAssignment mahalanobis_match(const Dataset& data, double ridge_scale = 1e-6) {
  data.validate();
  const Index n = data.n();
  const Index d = data.d();
  const Index treated = data.w.sum();
  check_arg(treated > 0 && treated < n, "mahalanobis_match: both arms must be non-empty");
  check_arg(ridge_scale >= 0.0, "mahalanobis_match: ridge_scale must be >= 0");

  Eigen::RowVectorXd mean = data.X.colwise().mean();
  Matrix centered = data.X.rowwise() - mean;
  Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
  if (ridge_scale > 0.0) {
    cov.diagonal().array() += ridge_scale * cov.trace() / static_cast<double>(d);
  }

  // Whiten once with the Cholesky factor; Mahalanobis distance becomes the
  // Euclidean distance between transformed rows.
  Eigen::LLT<Matrix> llt(cov);
  check_arg(llt.info() == Eigen::Success, "mahalanobis_match: covariance is not positive definite");
  Matrix Z = llt.matrixL().solve(data.X.transpose()).transpose();

  MatchAssignment match;
  match.partner.resize(static_cast<std::size_t>(n));
  match.distance.resize(n);
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index best_j = -1;
    for (Index j = 0; j < n; ++j) {
      if (data.w[j] == data.w[i]) continue;
      const double dist2 = (Z.row(i) - Z.row(j)).squaredNorm();
      if (dist2 < best) {
        best = dist2;
        best_j = j;
      }
    }
    match.partner[static_cast<std::size_t>(i)] = best_j;
    match.distance[i] = std::sqrt(best);
  }
  return match;
}

}  // namespace tauselect

#endif  // TAUSELECT_MATCHING_HPP_
