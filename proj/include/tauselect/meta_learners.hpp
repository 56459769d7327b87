// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_META_LEARNERS_HPP_
#define TAUSELECT_META_LEARNERS_HPP_

#include <algorithm>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tauselect/dataset.hpp"
#include "tauselect/learners.hpp"

namespace tauselect {

enum class MetaLearner { S, T, R };

inline std::string to_string(MetaLearner m) {
  switch (m) {
    case MetaLearner::S: return "S";
    case MetaLearner::T: return "T";
    default: return "R";
  }
}

/// Single-model learner on treatment-augmented features.
struct SLearnerModel {
  Regressor mu;  // regressor over [x, (w-0.5)*x, (w-0.5)]
};

/// Two per-arm outcome models.
struct TLearnerModel {
  Regressor mu0;
  Regressor mu1;
};

/// Direct effect regressor fit on R-learner pseudo-outcomes.
struct RLearnerModel {
  Regressor tau;
};

/// Treatment-augmented design [x, (w-0.5)*x, (w-0.5)] used by the S-learner.
/// The centered interaction block keeps the effect out of the main-effect
/// shrinkage; the main-effect column lets a linear model carry a constant
/// nonzero effect.
inline Matrix s_augment(const Matrix& X, double w_centered) {
  Matrix A(X.rows(), 2 * X.cols() + 1);
  A.leftCols(X.cols()) = X;
  A.middleCols(X.cols(), X.cols()) = X * w_centered;
  A.col(2 * X.cols()).setConstant(w_centered);
  return A;
}

inline Matrix s_augment(const Matrix& X, const IntVector& w) {
  check_arg(w.size() == X.rows(), "s_augment: w size mismatch");
  Matrix A(X.rows(), 2 * X.cols() + 1);
  A.leftCols(X.cols()) = X;
  for (Index i = 0; i < X.rows(); ++i) {
    const double c = w[i] - 0.5;
    A.row(i).segment(X.cols(), X.cols()) = X.row(i) * c;
    A(i, 2 * X.cols()) = c;
  }
  return A;
}

/// A fitted treatment-effect model tau_hat(x) with its provenance. S- and
/// T-learners expose outcome models, so tau_hat is exactly mu1_hat - mu0_hat;
/// R-learners predict the effect directly.
struct TauModel {
  MetaLearner meta = MetaLearner::S;
  AlgoSpec algo;
  std::variant<SLearnerModel, TLearnerModel, RLearnerModel> impl;

  bool has_outcome_predictors() const { return !std::holds_alternative<RLearnerModel>(impl); }

  Vector predict_mu(const Matrix& X, int arm) const {
    check_arg(arm == 0 || arm == 1, "predict_mu: arm must be 0 or 1");
    if (const auto* s = std::get_if<SLearnerModel>(&impl)) {
      return predict(s->mu, s_augment(X, arm - 0.5));
    }
    if (const auto* t = std::get_if<TLearnerModel>(&impl)) {
      return predict(arm == 0 ? t->mu0 : t->mu1, X);
    }
    throw UnsupportedModelError("R-learner has no outcome predictors");
  }

  Vector predict_tau(const Matrix& X) const {
    if (const auto* r = std::get_if<RLearnerModel>(&impl)) return predict(r->tau, X);
    return predict_mu(X, 1) - predict_mu(X, 0);
  }
};

namespace detail {

inline void check_both_arms(const Dataset& train, const char* who) {
  const Index treated = train.w.sum();
  check_arg(treated > 0 && treated < train.n(),
            std::string(who) + ": training data must contain both arms");
}

// Type-7 (linear interpolation) quantile of unsorted values.
inline double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

// Heavy-tailed pseudo-outcomes near p_hat ~ w destabilize tree leaf means;
// boosted-tree R-learners clamp to the central 99% before fitting.
inline Vector winsorize(const Vector& v, double lower_pct = 0.005, double upper_pct = 0.995) {
  std::vector<double> vals(v.data(), v.data() + v.size());
  const double lo = quantile(vals, lower_pct);
  const double hi = quantile(vals, upper_pct);
  Vector out = v;
  for (Index i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo, hi);
  return out;
}

struct RPseudoProblem {
  Vector pseudo;   // (y - m_hat) / (w - p_hat)
  Vector weights;  // (w - p_hat)^2
};

inline RPseudoProblem r_pseudo_problem(const Dataset& train, const Vector& m_hat,
                                       const Vector& p_hat) {
  const Index n = train.n();
  check_arg(m_hat.size() == n && p_hat.size() == n, "fit_r_learner: nuisance size mismatch");
  check_arg(m_hat.allFinite(), "fit_r_learner: non-finite m_hat");
  for (Index i = 0; i < n; ++i) {
    check_arg(p_hat[i] > 0.0 && p_hat[i] < 1.0, "fit_r_learner: p_hat must lie in (0,1)");
  }
  RPseudoProblem prob;
  prob.pseudo.resize(n);
  prob.weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double denom = train.w[i] - p_hat[i];
    prob.pseudo[i] = (train.y[i] - m_hat[i]) / denom;
    prob.weights[i] = denom * denom;
  }
  return prob;
}

}  // namespace detail

/// S-learner: one regressor on the treatment-augmented design;
/// tau_hat(x) = mu_hat(x,1) - mu_hat(x,0).
inline TauModel fit_s_learner(const Dataset& train, const AlgoSpec& spec, const EnParams& en = {},
                              const GbtParams& gbt = {}) {
  detail::check_both_arms(train, "fit_s_learner");
  const Matrix A = s_augment(train.X, train.w);
  const Vector unit = Vector::Ones(train.n());
  return TauModel{MetaLearner::S, spec, SLearnerModel{fit_regressor(A, train.y, unit, spec, en, gbt)}};
}

/// T-learner: mu0 fit on untreated rows, mu1 on treated rows, same algorithm
/// and hyperparameters for both.
inline TauModel fit_t_learner(const Dataset& train, const AlgoSpec& spec, const EnParams& en = {},
                              const GbtParams& gbt = {}) {
  std::vector<Index> arm0, arm1;
  for (Index i = 0; i < train.n(); ++i) (train.w[i] == 1 ? arm1 : arm0).push_back(i);
  const Index need = std::max<Index>(2, spec.family == Family::gbt ? 2 * gbt.min_node : 2);
  check_arg(static_cast<Index>(arm0.size()) >= need && static_cast<Index>(arm1.size()) >= need,
            "fit_t_learner: an arm has too few rows");
  const Dataset d0 = subset(train, arm0);
  const Dataset d1 = subset(train, arm1);
  return TauModel{MetaLearner::T, spec,
                  TLearnerModel{fit_regressor(d0.X, d0.y, Vector::Ones(d0.n()), spec, en, gbt),
                                fit_regressor(d1.X, d1.y, Vector::Ones(d1.n()), spec, en, gbt)}};
}

/// R-learner: weighted least squares on pseudo-outcomes
/// (y - m_hat) / (w - p_hat) with weights (w - p_hat)^2.
inline TauModel fit_r_learner(const Dataset& train, const Vector& m_hat, const Vector& p_hat,
                              const AlgoSpec& spec, const EnParams& en = {},
                              const GbtParams& gbt = {}) {
  detail::RPseudoProblem prob = detail::r_pseudo_problem(train, m_hat, p_hat);
  if (spec.family == Family::gbt) prob.pseudo = detail::winsorize(prob.pseudo);
  return TauModel{MetaLearner::R, spec,
                  RLearnerModel{fit_regressor(train.X, prob.pseudo, prob.weights, spec, en, gbt)}};
}

/// The candidate-model set M: every meta-learner crossed with every
/// algorithm/hyperparameter combination.
struct ModelGrid {
  std::vector<std::pair<MetaLearner, AlgoSpec>> entries;
};

inline ModelGrid enumerate_models(const CandidateGrid& grid) {
  ModelGrid out;
  const std::vector<AlgoSpec> specs = grid.specs();
  for (MetaLearner meta : {MetaLearner::S, MetaLearner::T, MetaLearner::R}) {
    for (const AlgoSpec& spec : specs) out.entries.emplace_back(meta, spec);
  }
  return out;
}

/// Fits the whole candidate set for one replication. Each meta-learner's
/// regression problem is fit once per family (elastic-net path plus one deep
/// tree ensemble), then materialized per candidate in enumerate_models order.
inline std::vector<TauModel> fit_all_models(const Dataset& train, const CandidateGrid& grid,
                                            const Vector& m_hat, const Vector& p_hat) {
  detail::check_both_arms(train, "fit_all_models");
  const Vector unit = Vector::Ones(train.n());
  std::vector<TauModel> models;
  models.reserve(3 * grid.size());
  const std::vector<AlgoSpec> specs = grid.specs();

  // S
  {
    const Matrix A = s_augment(train.X, train.w);
    const CandidateFit fit = fit_candidate_set(A, train.y, unit, grid);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      models.push_back(TauModel{MetaLearner::S, specs[k], SLearnerModel{fit.materialize(k)}});
    }
  }
  // T
  {
    std::vector<Index> arm0, arm1;
    for (Index i = 0; i < train.n(); ++i) (train.w[i] == 1 ? arm1 : arm0).push_back(i);
    const Dataset d0 = subset(train, arm0);
    const Dataset d1 = subset(train, arm1);
    const CandidateFit fit0 = fit_candidate_set(d0.X, d0.y, Vector::Ones(d0.n()), grid);
    const CandidateFit fit1 = fit_candidate_set(d1.X, d1.y, Vector::Ones(d1.n()), grid);
    for (std::size_t k = 0; k < specs.size(); ++k) {
      models.push_back(TauModel{MetaLearner::T, specs[k],
                                TLearnerModel{fit0.materialize(k), fit1.materialize(k)}});
    }
  }
  // R: elastic-net candidates on raw pseudo-outcomes, tree candidates on the
  // winsorized copy; the training nuisances are shared across all candidates.
  {
    const detail::RPseudoProblem prob = detail::r_pseudo_problem(train, m_hat, p_hat);
    CandidateFit fit;
    fit.lambdas = grid.lambdas;
    fit.tree_counts = grid.tree_counts;
    if (!grid.lambdas.empty()) {
      fit.en_models = fit_elastic_net_path(train.X, prob.pseudo, prob.weights, grid.en.alpha,
                                           grid.lambdas, grid.en.tol, grid.en.max_sweeps);
    }
    if (!grid.tree_counts.empty()) {
      const Vector winsorized = detail::winsorize(prob.pseudo);
      fit.gbt_model = fit_gbt(train.X, winsorized, prob.weights, grid.tree_counts.back(),
                              grid.gbt.depth, grid.gbt.shrinkage, grid.gbt.min_node);
    }
    for (std::size_t k = 0; k < specs.size(); ++k) {
      models.push_back(TauModel{MetaLearner::R, specs[k], RLearnerModel{fit.materialize(k)}});
    }
  }
  return models;
}

}  // namespace tauselect

#endif  // TAUSELECT_META_LEARNERS_HPP_
