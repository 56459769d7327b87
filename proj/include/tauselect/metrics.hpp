// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_METRICS_HPP_
#define TAUSELECT_METRICS_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tauselect/matching.hpp"
#include "tauselect/meta_learners.hpp"
#include "tauselect/nuisance.hpp"

namespace tauselect {

/// The validation-set model-selection metrics. Risk metrics are minimized;
/// value and gain metrics are maximized; `random` ignores scores entirely.
enum class MetricId {
  random,
  mu_risk,
  mu_risk_iptw,
  value_iptw,
  value_dr,
  tau_risk_match,
  tau_risk_iptw,
  tau_risk_r,
  gain_simple,
  gain_iptw,
};

inline bool maximizes(MetricId m) {
  return m == MetricId::value_iptw || m == MetricId::value_dr || m == MetricId::gain_simple ||
         m == MetricId::gain_iptw;
}

inline const std::vector<MetricId>& all_metrics() {
  static const std::vector<MetricId> metrics = {
      MetricId::random,       MetricId::mu_risk,       MetricId::mu_risk_iptw,
      MetricId::value_iptw,   MetricId::value_dr,      MetricId::tau_risk_match,
      MetricId::tau_risk_iptw, MetricId::tau_risk_r,   MetricId::gain_simple,
      MetricId::gain_iptw,
  };
  return metrics;
}

inline std::string to_string(MetricId m) {
  switch (m) {
    case MetricId::random: return "random";
    case MetricId::mu_risk: return "mu_risk";
    case MetricId::mu_risk_iptw: return "mu_risk_iptw";
    case MetricId::value_iptw: return "value_iptw";
    case MetricId::value_dr: return "value_dr";
    case MetricId::tau_risk_match: return "tau_risk_match";
    case MetricId::tau_risk_iptw: return "tau_risk_iptw";
    case MetricId::tau_risk_r: return "tau_risk_r";
    case MetricId::gain_simple: return "gain_simple";
    case MetricId::gain_iptw: return "gain_iptw";
  }
  return "unknown";
}

inline MetricId metric_from_string(const std::string& s) {
  for (MetricId m : all_metrics()) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown metric: " + s);
}

/// Treatment policy d(x) = I(tau_hat(x) > 0), strict.
inline IntVector policy(const Vector& tau_hat) {
  IntVector d(tau_hat.size());
  for (Index i = 0; i < tau_hat.size(); ++i) d[i] = tau_hat[i] > 0.0 ? 1 : 0;
  return d;
}

inline IntVector policy(const TauModel& model, const Matrix& X) {
  return policy(model.predict_tau(X));
}

/// One model's predictions on a validation set: the effect estimate plus, for
/// S- and T-learners, the native outcome models.
struct TauPredictions {
  Vector tau;
  std::optional<Vector> mu0;
  std::optional<Vector> mu1;
};

inline TauPredictions predict_on(const TauModel& model, const Matrix& X) {
  TauPredictions pred;
  if (model.has_outcome_predictors()) {
    pred.mu0 = model.predict_mu(X, 0);
    pred.mu1 = model.predict_mu(X, 1);
    pred.tau = *pred.mu1 - *pred.mu0;
  } else {
    pred.tau = model.predict_tau(X);
  }
  return pred;
}

namespace detail {

// Outcome models for scoring: native when the model has them; otherwise
// reconstructed from validation nuisances as mu1 = m + (1-p)*tau and
// mu0 = m - p*tau, so R-learners stay scorable under the mu-risk metrics.
struct OutcomePair {
  Vector mu0;
  Vector mu1;
};

inline OutcomePair scoring_outcomes(const TauPredictions& pred, const NuisanceEstimates* nuis) {
  if (pred.mu0.has_value() && pred.mu1.has_value()) return {*pred.mu0, *pred.mu1};
  if (nuis == nullptr) {
    throw UnsupportedModelError(
        "model has no outcome predictors and no nuisance estimates to reconstruct them");
  }
  OutcomePair out;
  out.mu1 = nuis->m_check + (Vector::Ones(pred.tau.size()) - nuis->p_check).cwiseProduct(pred.tau);
  out.mu0 = nuis->m_check - nuis->p_check.cwiseProduct(pred.tau);
  return out;
}

}  // namespace detail

/// Mean squared error of the observed-arm outcome predictions.
inline double mu_risk(const TauPredictions& pred, const Dataset& val,
                      const NuisanceEstimates* nuis = nullptr) {
  const auto mu = detail::scoring_outcomes(pred, nuis);
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    const double r = (val.w[i] == 1 ? mu.mu1[i] : mu.mu0[i]) - val.y[i];
    sum += r * r;
  }
  return sum / static_cast<double>(val.n());
}

/// Observed-arm squared residuals weighted by the inverse propensity of the
/// observed treatment.
inline double mu_risk_iptw(const TauPredictions& pred, const Dataset& val,
                           const NuisanceEstimates& nuis) {
  const auto mu = detail::scoring_outcomes(pred, &nuis);
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    const double r = (val.w[i] == 1 ? mu.mu1[i] : mu.mu0[i]) - val.y[i];
    sum += r * r / nuis.p_observed(val.w, i);
  }
  return sum / static_cast<double>(val.n());
}

/// IPTW estimate of the policy value E[Y | W = d(X)].
inline double value_iptw(const TauPredictions& pred, const Dataset& val,
                         const NuisanceEstimates& nuis) {
  const IntVector d = policy(pred.tau);
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    if (val.w[i] == d[i]) sum += val.y[i] / nuis.p_observed(val.w, i);
  }
  return sum / static_cast<double>(val.n());
}

/// Doubly-robust estimate of the value of treating the d(x)=1 group.
inline double value_dr(const TauPredictions& pred, const Dataset& val,
                       const NuisanceEstimates& nuis) {
  const IntVector d = policy(pred.tau);
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    if (d[i] == 0) continue;
    const double mu_obs = val.w[i] == 1 ? nuis.mu1_check[i] : nuis.mu0_check[i];
    const double sign = 2.0 * val.w[i] - 1.0;
    sum += nuis.mu1_check[i] - nuis.mu0_check[i] +
           sign * (val.y[i] - mu_obs) / nuis.p_observed(val.w, i);
  }
  return sum / static_cast<double>(val.n());
}

/// Classic uplift estimate: difference of treated/untreated outcome means in
/// the d(x)=1 group, scaled by the size of that group. Assumes a constant
/// propensity. Zero when the policy treats nobody; undefined when the treated
/// group lacks one of the arms.
inline double gain_simple(const TauPredictions& pred, const Dataset& val) {
  const IntVector d = policy(pred.tau);
  double n_sel = 0.0, n_sel_w1 = 0.0, n_sel_w0 = 0.0;
  double sum_y_w1 = 0.0, sum_y_w0 = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    if (d[i] == 0) continue;
    n_sel += 1.0;
    if (val.w[i] == 1) {
      n_sel_w1 += 1.0;
      sum_y_w1 += val.y[i];
    } else {
      n_sel_w0 += 1.0;
      sum_y_w0 += val.y[i];
    }
  }
  if (n_sel == 0.0) return 0.0;
  if (n_sel_w1 == 0.0 || n_sel_w0 == 0.0) {
    throw UndefinedScoreError("gain_simple: policy-treated group lacks a treatment arm");
  }
  return (sum_y_w1 / n_sel_w1 - sum_y_w0 / n_sel_w0) * n_sel / static_cast<double>(val.n());
}

/// IPTW uplift estimate; valid under non-constant propensities.
inline double gain_iptw(const TauPredictions& pred, const Dataset& val,
                        const NuisanceEstimates& nuis) {
  const IntVector d = policy(pred.tau);
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    if (d[i] == 0) continue;
    if (val.w[i] == 1) {
      sum += val.y[i] / nuis.p_check[i];
    } else {
      sum -= val.y[i] / (1.0 - nuis.p_check[i]);
    }
  }
  return sum / static_cast<double>(val.n());
}

/// Squared distance to the matched plug-in effect (2w-1)(y_i - y_partner).
inline double tau_risk_match(const TauPredictions& pred, const Dataset& val,
                             const MatchAssignment& match) {
  check_arg(static_cast<Index>(match.partner.size()) == val.n(),
            "tau_risk_match: match not computed on this validation set");
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    const double plug_in =
        (2.0 * val.w[i] - 1.0) * (val.y[i] - val.y[match.partner[static_cast<std::size_t>(i)]]);
    const double r = pred.tau[i] - plug_in;
    sum += r * r;
  }
  return sum / static_cast<double>(val.n());
}

/// Squared distance to the IPTW transformed outcome (2w-1) y / p_w.
inline double tau_risk_iptw(const TauPredictions& pred, const Dataset& val,
                            const NuisanceEstimates& nuis) {
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    const double transformed = (2.0 * val.w[i] - 1.0) * val.y[i] / nuis.p_observed(val.w, i);
    const double r = pred.tau[i] - transformed;
    sum += r * r;
  }
  return sum / static_cast<double>(val.n());
}

/// R-learner objective evaluated on the validation set.
inline double tau_risk_r(const TauPredictions& pred, const Dataset& val,
                         const NuisanceEstimates& nuis) {
  double sum = 0.0;
  for (Index i = 0; i < val.n(); ++i) {
    const double r = (val.y[i] - nuis.m_check[i]) - (val.w[i] - nuis.p_check[i]) * pred.tau[i];
    sum += r * r;
  }
  return sum / static_cast<double>(val.n());
}

// Spec-facing overloads that accept a fitted model directly.
inline double mu_risk(const TauModel& model, const Dataset& val,
                      const NuisanceEstimates* nuis = nullptr) {
  return mu_risk(predict_on(model, val.X), val, nuis);
}
inline double mu_risk_iptw(const TauModel& model, const Dataset& val, const NuisanceEstimates& nuis) {
  return mu_risk_iptw(predict_on(model, val.X), val, nuis);
}
inline double value_iptw(const TauModel& model, const Dataset& val, const NuisanceEstimates& nuis) {
  return value_iptw(predict_on(model, val.X), val, nuis);
}
inline double value_dr(const TauModel& model, const Dataset& val, const NuisanceEstimates& nuis) {
  return value_dr(predict_on(model, val.X), val, nuis);
}
inline double gain_simple(const TauModel& model, const Dataset& val) {
  return gain_simple(predict_on(model, val.X), val);
}
inline double gain_iptw(const TauModel& model, const Dataset& val, const NuisanceEstimates& nuis) {
  return gain_iptw(predict_on(model, val.X), val, nuis);
}
inline double tau_risk_match(const TauModel& model, const Dataset& val,
                             const MatchAssignment& match) {
  return tau_risk_match(predict_on(model, val.X), val, match);
}
inline double tau_risk_iptw(const TauModel& model, const Dataset& val,
                            const NuisanceEstimates& nuis) {
  return tau_risk_iptw(predict_on(model, val.X), val, nuis);
}
inline double tau_risk_r(const TauModel& model, const Dataset& val, const NuisanceEstimates& nuis) {
  return tau_risk_r(predict_on(model, val.X), val, nuis);
}

/// Scores one model under one metric; throws UnsupportedModelError or
/// UndefinedScoreError when the model cannot be scored.
inline double score_metric(MetricId metric, const TauPredictions& pred, const Dataset& val,
                           const NuisanceEstimates& nuis, const MatchAssignment& match) {
  switch (metric) {
    case MetricId::mu_risk: return mu_risk(pred, val, &nuis);
    case MetricId::mu_risk_iptw: return mu_risk_iptw(pred, val, nuis);
    case MetricId::value_iptw: return value_iptw(pred, val, nuis);
    case MetricId::value_dr: return value_dr(pred, val, nuis);
    case MetricId::tau_risk_match: return tau_risk_match(pred, val, match);
    case MetricId::tau_risk_iptw: return tau_risk_iptw(pred, val, nuis);
    case MetricId::tau_risk_r: return tau_risk_r(pred, val, nuis);
    case MetricId::gain_simple: return gain_simple(pred, val);
    case MetricId::gain_iptw: return gain_iptw(pred, val, nuis);
    case MetricId::random: break;
  }
  throw std::invalid_argument("score_metric: 'random' has no per-model score");
}

inline std::optional<double> try_score_metric(MetricId metric, const TauPredictions& pred,
                                              const Dataset& val, const NuisanceEstimates& nuis,
                                              const MatchAssignment& match) {
  try {
    return score_metric(metric, pred, val, nuis, match);
  } catch (const UnsupportedModelError&) {
    return std::nullopt;
  } catch (const UndefinedScoreError&) {
    return std::nullopt;
  }
}

/// Argmin/argmax over scorable models, ties to the lowest index; models with
/// no score are excluded. Throws SelectionFailureError if nothing is scorable.
inline std::size_t select_from_scores(const std::vector<std::optional<double>>& scores,
                                      MetricId metric) {
  check_arg(!scores.empty(), "select: no models");
  const bool maximize = maximizes(metric);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!scores[k].has_value()) continue;
    if (!best.has_value() || (maximize ? *scores[k] > *scores[*best] : *scores[k] < *scores[*best])) {
      best = k;
    }
  }
  if (!best.has_value()) {
    throw SelectionFailureError("select: no scorable model for metric " + to_string(metric));
  }
  return *best;
}

/// Model selection over a candidate set: uniform random draw for `random`,
/// otherwise the best score under the metric's direction.
inline std::size_t select(const std::vector<TauModel>& models, MetricId metric, const Dataset& val,
                          const NuisanceEstimates& nuis, const MatchAssignment& match,
                          const RandomStream& stream) {
  check_arg(!models.empty(), "select: no models");
  if (metric == MetricId::random) {
    Rng rng = stream.engine();
    return static_cast<std::size_t>(rng.uniform_index(models.size()));
  }
  std::vector<std::optional<double>> scores;
  scores.reserve(models.size());
  for (const TauModel& model : models) {
    scores.push_back(try_score_metric(metric, predict_on(model, val.X), val, nuis, match));
  }
  return select_from_scores(scores, metric);
}

}  // namespace tauselect

#endif  // TAUSELECT_METRICS_HPP_
