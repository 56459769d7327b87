// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_EVALUATION_HPP_
#define TAUSELECT_EVALUATION_HPP_

#include "tauselect/metrics.hpp"
#include "tauselect/scenarios.hpp"

namespace tauselect {

/// True test-set performance of a selected model, computable only in
/// simulation where the ground truth is known.
struct EvaluationResult {
  double tau_risk_test = 0.0;
  double value_test = 0.0;
  std::size_t model_id = 0;
  MetricId metric = MetricId::random;
};

/// Mean squared error of tau_hat against the true effect.
inline double test_tau_risk(const Vector& tau_hat, const GroundTruth& truth) {
  check_arg(truth.tau.size() == tau_hat.size(), "test_tau_risk: misaligned ground truth");
  double sum = 0.0;
  for (Index i = 0; i < tau_hat.size(); ++i) {
    const double r = tau_hat[i] - truth.tau[i];
    sum += r * r;
  }
  return sum / static_cast<double>(tau_hat.size());
}

/// Mean true outcome under the policy d(x) = I(tau_hat(x) > 0), using the
/// true conditional means rather than observed outcomes.
inline double test_value(const Vector& tau_hat, const GroundTruth& truth) {
  check_arg(truth.mu0.size() == tau_hat.size() && truth.mu1.size() == tau_hat.size(),
            "test_value: misaligned ground truth");
  const IntVector d = policy(tau_hat);
  double sum = 0.0;
  for (Index i = 0; i < tau_hat.size(); ++i) {
    sum += d[i] == 1 ? truth.mu1[i] : truth.mu0[i];
  }
  return sum / static_cast<double>(tau_hat.size());
}

inline double test_tau_risk(const TauModel& model, const Dataset& test, const GroundTruth& truth) {
  check_arg(truth.tau.size() == test.n(), "test_tau_risk: misaligned ground truth");
  return test_tau_risk(model.predict_tau(test.X), truth);
}

inline double test_value(const TauModel& model, const Dataset& test, const GroundTruth& truth) {
  check_arg(truth.mu0.size() == test.n(), "test_value: misaligned ground truth");
  return test_value(model.predict_tau(test.X), truth);
}

}  // namespace tauselect

#endif  // TAUSELECT_EVALUATION_HPP_
