// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_CROSS_VALIDATION_HPP_
#define TAUSELECT_CROSS_VALIDATION_HPP_

#include <limits>
#include <numeric>
#include <vector>

#include "tauselect/learners.hpp"
#include "tauselect/random.hpp"

namespace tauselect {

/// Random fold assignment: a shuffled permutation dealt into `folds`
/// contiguous blocks whose sizes differ by at most one.
inline std::vector<int> assign_folds(Index n, int folds, const RandomStream& stream) {
  check_arg(folds >= 2, "assign_folds: need folds >= 2");
  check_arg(n >= 2 * static_cast<Index>(folds), "assign_folds: a fold would have fewer than 2 rows");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = stream.engine();
  rng.shuffle(perm);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  const Index base = n / folds;
  const Index extra = n % folds;
  Index pos = 0;
  for (int f = 0; f < folds; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index k = 0; k < size; ++k) fold_of[static_cast<std::size_t>(perm[pos + k])] = f;
    pos += size;
  }
  return fold_of;
}

struct CrossValResult {
  std::size_t best_index = 0;           // into grid.specs()
  Vector oof_predictions;               // winning candidate, every row
  std::vector<double> cv_mse;           // weighted out-of-fold MSE per candidate
  std::vector<int> fold_of;             // per-row fold id
};

/// Cross-fit every candidate given a fixed fold assignment. Fitting uses rows
/// with fit_mask set (outside the held-out fold); predictions are produced
/// for all held-out rows; scoring uses fit_mask rows only. Row i's
/// out-of-fold prediction never involves row i in fitting.
inline CrossValResult cross_val_select_masked(const Matrix& X, const Vector& y,
                                              const Vector& weights,
                                              const std::vector<char>& fit_mask,
                                              const CandidateGrid& grid,
                                              const std::vector<int>& fold_of) {
  grid.validate();
  const Index n = X.rows();
  check_arg(y.size() == n && weights.size() == n, "cross_val_select: size mismatch");
  check_arg(static_cast<Index>(fit_mask.size()) == n && static_cast<Index>(fold_of.size()) == n,
            "cross_val_select: mask/fold size mismatch");
  const std::size_t m = grid.size();
  int folds = 0;
  for (int f : fold_of) folds = std::max(folds, f + 1);

  Matrix oof(static_cast<Index>(m), n);
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> fit_rows;
    std::vector<Index> heldout_rows;
    for (Index i = 0; i < n; ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == f) {
        heldout_rows.push_back(i);
      } else if (fit_mask[static_cast<std::size_t>(i)]) {
        fit_rows.push_back(i);
      }
    }
    check_arg(!fit_rows.empty(), "cross_val_select: empty training part for a fold");
    if (heldout_rows.empty()) continue;

    Matrix Xf(static_cast<Index>(fit_rows.size()), X.cols());
    Vector yf(static_cast<Index>(fit_rows.size()));
    Vector wf(static_cast<Index>(fit_rows.size()));
    for (std::size_t k = 0; k < fit_rows.size(); ++k) {
      Xf.row(static_cast<Index>(k)) = X.row(fit_rows[k]);
      yf[static_cast<Index>(k)] = y[fit_rows[k]];
      wf[static_cast<Index>(k)] = weights[fit_rows[k]];
    }
    Matrix Xh(static_cast<Index>(heldout_rows.size()), X.cols());
    for (std::size_t k = 0; k < heldout_rows.size(); ++k) {
      Xh.row(static_cast<Index>(k)) = X.row(heldout_rows[k]);
    }

    const CandidateFit fit = fit_candidate_set(Xf, yf, wf, grid);
    const std::vector<Vector> preds = fit.predict_all(Xh);
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t k = 0; k < heldout_rows.size(); ++k) {
        oof(static_cast<Index>(c), heldout_rows[k]) = preds[c][static_cast<Index>(k)];
      }
    }
  }

  double scored_weight = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (fit_mask[static_cast<std::size_t>(i)]) scored_weight += weights[i];
  }
  check_arg(scored_weight > 0.0, "cross_val_select: no positive-weight scored rows");

  CrossValResult result;
  result.fold_of = fold_of;
  result.cv_mse.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    double sse = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (!fit_mask[static_cast<std::size_t>(i)]) continue;
      const double r = oof(static_cast<Index>(c), i) - y[i];
      sse += weights[i] * r * r;
    }
    result.cv_mse[c] = sse / scored_weight;
  }
  result.best_index = 0;
  for (std::size_t c = 1; c < m; ++c) {
    if (result.cv_mse[c] < result.cv_mse[result.best_index]) result.best_index = c;
  }
  result.oof_predictions = oof.row(static_cast<Index>(result.best_index));
  return result;
}

/// Selects the candidate with the lowest weighted out-of-fold MSE and returns
/// its out-of-fold predictions for every row. Fold assignment is
/// deterministic given the stream; ties go to the lowest candidate index.
inline CrossValResult cross_val_select(const Matrix& X, const Vector& y, const Vector& weights,
                                       const CandidateGrid& grid, int folds,
                                       const RandomStream& stream) {
  const std::vector<int> fold_of = assign_folds(X.rows(), folds, stream);
  const std::vector<char> all(static_cast<std::size_t>(X.rows()), char{1});
  return cross_val_select_masked(X, y, weights, all, grid, fold_of);
}

}  // namespace tauselect

#endif  // TAUSELECT_CROSS_VALIDATION_HPP_
