// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_DATASET_HPP_
#define TAUSELECT_DATASET_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "tauselect/common.hpp"
#include "tauselect/random.hpp"

namespace tauselect {

/// A cohort: covariates X (n x d), binary treatment w, real outcome y.
/// Immutable after construction; validate() enforces the shape and
/// finiteness invariants.
struct Dataset {
  Matrix X;
  IntVector w;
  Vector y;

  Index n() const { return X.rows(); }
  Index d() const { return X.cols(); }

  void validate() const {
    check_arg(X.rows() >= 1 && X.cols() >= 1, "Dataset: need n >= 1 and d >= 1");
    check_arg(w.size() == X.rows() && y.size() == X.rows(),
              "Dataset: X, w, y must share the same number of rows");
    check_arg(X.allFinite(), "Dataset: X has non-finite entries");
    check_arg(y.allFinite(), "Dataset: y has non-finite entries");
    for (Index i = 0; i < w.size(); ++i) {
      check_arg(w[i] == 0 || w[i] == 1, "Dataset: w entries must be 0 or 1");
    }
  }
};

/// Disjoint train/validation/test index sets covering {0..n-1}.
struct SplitIndices {
  std::vector<Index> train;
  std::vector<Index> validation;
  std::vector<Index> test;
};

/// Uniformly random partition of {0..n-1} into three blocks of the given
/// sizes. Deterministic for a given stream. Each block is returned in
/// ascending order so downstream row order matches the source dataset.
inline SplitIndices make_splits(Index n, std::array<Index, 3> sizes, const RandomStream& stream) {
  check_arg(sizes[0] >= 1 && sizes[1] >= 1 && sizes[2] >= 1, "make_splits: each size must be >= 1");
  check_arg(sizes[0] + sizes[1] + sizes[2] == n, "make_splits: sizes must sum to n");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = stream.engine();
  rng.shuffle(perm);

  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + sizes[0]);
  s.validation.assign(perm.begin() + sizes[0], perm.begin() + sizes[0] + sizes[1]);
  s.test.assign(perm.begin() + sizes[0] + sizes[1], perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

/// Rows of X, w, y restricted to idx, order preserved.
inline Dataset subset(const Dataset& data, const std::vector<Index>& idx) {
  const Index n = data.n();
  Dataset out;
  out.X.resize(static_cast<Index>(idx.size()), data.d());
  out.w.resize(static_cast<Index>(idx.size()));
  out.y.resize(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Index i = idx[k];
    check_arg(i >= 0 && i < n, "subset: index out of range");
    out.X.row(static_cast<Index>(k)) = data.X.row(i);
    out.w[static_cast<Index>(k)] = data.w[i];
    out.y[static_cast<Index>(k)] = data.y[i];
  }
  return out;
}

/// CSV with header x1,...,xd,w,y at full (17 significant digit) precision.
inline void write_csv(const Dataset& data, std::ostream& os) {
  for (Index j = 0; j < data.d(); ++j) os << "x" << (j + 1) << ",";
  os << "w,y\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.d(); ++j) os << format_double(data.X(i, j)) << ",";
    os << data.w[i] << "," << format_double(data.y[i]) << "\n";
  }
}

}  // namespace tauselect

#endif  // TAUSELECT_DATASET_HPP_
