// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_NUISANCE_HPP_
#define TAUSELECT_NUISANCE_HPP_

#include <algorithm>
#include <optional>
#include <vector>

#include "tauselect/cross_validation.hpp"
#include "tauselect/dataset.hpp"

namespace tauselect {

inline constexpr double kPropensityClipLo = 0.025;
inline constexpr double kPropensityClipHi = 0.975;

/// Out-of-fold nuisance estimates on one split, row-aligned with its dataset.
/// p_check estimates P(W=1|x) (clipped), m_check estimates E[Y|x], and
/// mu0_check / mu1_check estimate the per-arm outcome means.
struct NuisanceEstimates {
  Vector p_check;
  Vector m_check;
  Vector mu0_check;
  Vector mu1_check;

  /// Probability of the observed arm: p_check if w=1, else 1 - p_check.
  double p_observed(const IntVector& w, Index i) const {
    return w[i] == 1 ? p_check[i] : 1.0 - p_check[i];
  }
};

namespace detail {

inline void check_folds_have_both_arms(const Dataset& data, const std::vector<int>& fold_of) {
  int folds = 0;
  for (int f : fold_of) folds = std::max(folds, f + 1);
  std::vector<int> treated(static_cast<std::size_t>(folds), 0);
  std::vector<int> untreated(static_cast<std::size_t>(folds), 0);
  for (Index i = 0; i < data.n(); ++i) {
    (data.w[i] == 1 ? treated : untreated)[static_cast<std::size_t>(fold_of[static_cast<std::size_t>(i)])]++;
  }
  for (int f = 0; f < folds; ++f) {
    check_arg(treated[static_cast<std::size_t>(f)] > 0 && untreated[static_cast<std::size_t>(f)] > 0,
              "cross_estimate: a fold is missing a treatment arm");
  }
}

inline std::vector<char> arm_mask(const IntVector& w, int arm) {
  std::vector<char> mask(static_cast<std::size_t>(w.size()));
  for (Index i = 0; i < w.size(); ++i) mask[static_cast<std::size_t>(i)] = w[i] == arm ? 1 : 0;
  return mask;
}

}  // namespace detail

/// Cross-validated cross-estimation of m_check and p_check only (what the
/// R-learner needs on the training split).
inline std::pair<Vector, Vector> cross_estimate_mp(const Dataset& data, int folds,
                                                   const CandidateGrid& grid,
                                                   const RandomStream& stream,
                                                   std::optional<double> known_propensity = {}) {
  data.validate();
  const std::vector<int> fold_of = assign_folds(data.n(), folds, stream);
  detail::check_folds_have_both_arms(data, fold_of);
  const std::vector<char> all(static_cast<std::size_t>(data.n()), char{1});
  const Vector unit = Vector::Ones(data.n());

  Vector m_check =
      cross_val_select_masked(data.X, data.y, unit, all, grid, fold_of).oof_predictions;

  Vector p_check;
  if (known_propensity.has_value()) {
    check_arg(*known_propensity > 0.0 && *known_propensity < 1.0,
              "cross_estimate: known_propensity must lie in (0,1)");
    p_check = Vector::Constant(data.n(),
                               std::clamp(*known_propensity, kPropensityClipLo, kPropensityClipHi));
  } else {
    const Vector w_target = data.w.cast<double>();
    p_check = cross_val_select_masked(data.X, w_target, unit, all, grid, fold_of).oof_predictions;
    for (Index i = 0; i < p_check.size(); ++i) {
      p_check[i] = std::clamp(p_check[i], kPropensityClipLo, kPropensityClipHi);
    }
  }
  return {std::move(m_check), std::move(p_check)};
}

/// Out-of-fold estimates of (p, m, mu0, mu1) by cross-validated
/// cross-estimation inside the given split: one shared fold assignment, one
/// candidate-grid CV per target, out-of-fold predictions from each target's
/// winning candidate. The propensity regresses the 0/1 indicator under
/// squared loss and is clipped; if known_propensity is supplied it is used
/// verbatim and not estimated.
inline NuisanceEstimates cross_estimate(const Dataset& data, int folds, const CandidateGrid& grid,
                                        const RandomStream& stream,
                                        std::optional<double> known_propensity = {}) {
  data.validate();
  const std::vector<int> fold_of = assign_folds(data.n(), folds, stream);
  detail::check_folds_have_both_arms(data, fold_of);
  const std::vector<char> all(static_cast<std::size_t>(data.n()), char{1});
  const Vector unit = Vector::Ones(data.n());

  NuisanceEstimates est;
  est.m_check = cross_val_select_masked(data.X, data.y, unit, all, grid, fold_of).oof_predictions;
  est.mu0_check =
      cross_val_select_masked(data.X, data.y, unit, detail::arm_mask(data.w, 0), grid, fold_of)
          .oof_predictions;
  est.mu1_check =
      cross_val_select_masked(data.X, data.y, unit, detail::arm_mask(data.w, 1), grid, fold_of)
          .oof_predictions;

  if (known_propensity.has_value()) {
    check_arg(*known_propensity > 0.0 && *known_propensity < 1.0,
              "cross_estimate: known_propensity must lie in (0,1)");
    est.p_check = Vector::Constant(
        data.n(), std::clamp(*known_propensity, kPropensityClipLo, kPropensityClipHi));
  } else {
    const Vector w_target = data.w.cast<double>();
    est.p_check =
        cross_val_select_masked(data.X, w_target, unit, all, grid, fold_of).oof_predictions;
    for (Index i = 0; i < est.p_check.size(); ++i) {
      est.p_check[i] = std::clamp(est.p_check[i], kPropensityClipLo, kPropensityClipHi);
    }
  }
  return est;
}

}  // namespace tauselect

#endif  // TAUSELECT_NUISANCE_HPP_
