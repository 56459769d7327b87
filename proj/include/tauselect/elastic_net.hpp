// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_ELASTIC_NET_HPP_
#define TAUSELECT_ELASTIC_NET_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tauselect/common.hpp"

namespace tauselect {

/// Weighted elastic-net linear model. The penalty applies to coefficients on
/// the standardized feature scale; `coefficients` and `intercept` are mapped
/// back to the original scale. Standardization statistics are kept so the
/// solution can be audited (objective / KKT) after fitting.
struct ElasticNetModel {
  Vector coefficients;  // original scale, length d
  double intercept = 0.0;
  double alpha = 0.5;
  double lambda = 0.0;
  Vector feature_means;   // weighted means at fit time
  Vector feature_scales;  // weighted population sds; 0 marks a constant feature

  Vector predict(const Matrix& X) const {
    check_arg(X.cols() == coefficients.size(), "ElasticNetModel::predict: feature count mismatch");
    return (X * coefficients).array() + intercept;
  }

  /// Coefficients on the standardized scale (beta_j = coef_j * scale_j).
  Vector std_coefficients() const {
    return coefficients.cwiseProduct(feature_scales);
  }
};

namespace detail {

inline double soft_threshold(double z, double g) {
  if (z > g) return z - g;
  if (z < -g) return z + g;
  return 0.0;
}

// Shared standardization workspace for a path of lambdas.
struct EnWorkspace {
  Matrix Z;             // standardized features (constant columns zeroed)
  Vector wnorm;         // weights normalized to sum 1
  Vector yc;            // y minus weighted mean
  Vector means, scales;
  double y_mean = 0.0;
  std::vector<Index> active;  // non-constant feature indices
};

inline EnWorkspace en_prepare(const Matrix& X, const Vector& y, const Vector& weights) {
  const Index n = X.rows();
  const Index d = X.cols();
  check_arg(n >= 2, "fit_elastic_net: need n >= 2");
  check_arg(y.size() == n && weights.size() == n, "fit_elastic_net: size mismatch");
  check_arg(X.allFinite() && y.allFinite() && weights.allFinite(),
            "fit_elastic_net: non-finite inputs");
  check_arg((weights.array() >= 0.0).all(), "fit_elastic_net: negative weights");
  const double wsum = weights.sum();
  check_arg(wsum > 0.0, "fit_elastic_net: all weights are zero");

  EnWorkspace ws;
  ws.wnorm = weights / wsum;
  ws.y_mean = ws.wnorm.dot(y);
  ws.yc = y.array() - ws.y_mean;
  ws.means.resize(d);
  ws.scales.resize(d);
  ws.Z.resize(n, d);
  for (Index j = 0; j < d; ++j) {
    const double m = ws.wnorm.dot(X.col(j));
    const Vector centered = X.col(j).array() - m;
    const double var = ws.wnorm.dot(centered.cwiseProduct(centered));
    const double s = std::sqrt(std::max(var, 0.0));
    ws.means[j] = m;
    ws.scales[j] = s;
    if (s > 1e-12) {
      ws.Z.col(j) = centered / s;
      ws.active.push_back(j);
    } else {
      ws.Z.col(j).setZero();
      ws.scales[j] = 0.0;
    }
  }
  return ws;
}

// Cyclic coordinate descent. beta (standardized scale) is used as the warm
// start and holds the solution on return.
inline void en_solve(const EnWorkspace& ws, double alpha, double lambda, double tol,
                     int max_sweeps, Vector& beta) {
  const double l1 = lambda * alpha;
  const double l2 = lambda * (1.0 - alpha);
  Vector residual = ws.yc - ws.Z * beta;
  // Weighted mean square of each standardized column is 1 by construction;
  // recompute to absorb rounding.
  std::vector<double> denom(ws.active.size());
  for (std::size_t k = 0; k < ws.active.size(); ++k) {
    const Index j = ws.active[k];
    denom[k] = ws.wnorm.dot(ws.Z.col(j).cwiseProduct(ws.Z.col(j))) + l2;
  }

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t k = 0; k < ws.active.size(); ++k) {
      const Index j = ws.active[k];
      const double rho =
          (ws.wnorm.cwiseProduct(ws.Z.col(j))).dot(residual) + (denom[k] - l2) * beta[j];
      const double updated = soft_threshold(rho, l1) / denom[k];
      const double delta = updated - beta[j];
      if (delta != 0.0) {
        residual -= ws.Z.col(j) * delta;
        beta[j] = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < tol) {
      // Converged by coefficient change; verify stationarity before stopping.
      double kkt = 0.0;
      for (std::size_t k = 0; k < ws.active.size(); ++k) {
        const Index j = ws.active[k];
        const double grad = -(ws.wnorm.cwiseProduct(ws.Z.col(j))).dot(residual) + l2 * beta[j];
        const double v = beta[j] != 0.0 ? std::abs(grad + l1 * (beta[j] > 0 ? 1.0 : -1.0))
                                        : std::max(0.0, std::abs(grad) - l1);
        kkt = std::max(kkt, v);
      }
      if (kkt <= 5e-7) break;
    }
  }
}

}  // namespace detail

/// Minimizes 0.5 * weighted-MSE + lambda * (alpha * |beta|_1 + (1-alpha)/2 * |beta|_2^2)
/// over standardized features; the intercept is unpenalized. Weights are
/// normalized internally, so scaling all weights leaves the fit unchanged.
inline ElasticNetModel fit_elastic_net(const Matrix& X, const Vector& y, const Vector& weights,
                                       double alpha, double lambda, double tol = 1e-7,
                                       int max_sweeps = 10000) {
  check_arg(alpha >= 0.0 && alpha <= 1.0, "fit_elastic_net: alpha must be in [0,1]");
  check_arg(lambda >= 0.0, "fit_elastic_net: lambda must be >= 0");
  const detail::EnWorkspace ws = detail::en_prepare(X, y, weights);
  Vector beta = Vector::Zero(X.cols());
  detail::en_solve(ws, alpha, lambda, tol, max_sweeps, beta);

  ElasticNetModel model;
  model.alpha = alpha;
  model.lambda = lambda;
  model.feature_means = ws.means;
  model.feature_scales = ws.scales;
  model.coefficients = Vector::Zero(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    if (ws.scales[j] > 0.0) model.coefficients[j] = beta[j] / ws.scales[j];
  }
  model.intercept = ws.y_mean - model.coefficients.dot(ws.means);
  return model;
}

/// Fits one model per lambda with warm starts along the decreasing-lambda
/// path. Returned models align with the input lambda order.
inline std::vector<ElasticNetModel> fit_elastic_net_path(const Matrix& X, const Vector& y,
                                                         const Vector& weights, double alpha,
                                                         const std::vector<double>& lambdas,
                                                         double tol = 1e-7, int max_sweeps = 10000) {
  check_arg(alpha >= 0.0 && alpha <= 1.0, "fit_elastic_net_path: alpha must be in [0,1]");
  for (double l : lambdas) check_arg(l >= 0.0, "fit_elastic_net_path: lambda must be >= 0");
  const detail::EnWorkspace ws = detail::en_prepare(X, y, weights);

  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });

  std::vector<ElasticNetModel> models(lambdas.size());
  Vector beta = Vector::Zero(X.cols());
  for (std::size_t k : order) {
    detail::en_solve(ws, alpha, lambdas[k], tol, max_sweeps, beta);
    ElasticNetModel model;
    model.alpha = alpha;
    model.lambda = lambdas[k];
    model.feature_means = ws.means;
    model.feature_scales = ws.scales;
    model.coefficients = Vector::Zero(X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
      if (ws.scales[j] > 0.0) model.coefficients[j] = beta[j] / ws.scales[j];
    }
    model.intercept = ws.y_mean - model.coefficients.dot(ws.means);
    models[k] = std::move(model);
  }
  return models;
}

/// Elastic-net objective of a standardized-scale coefficient vector, with the
/// intercept profiled out. Used by tests to audit fitted solutions.
inline double elastic_net_objective(const Matrix& X, const Vector& y, const Vector& weights,
                                    double alpha, double lambda, const Vector& beta_std) {
  const detail::EnWorkspace ws = detail::en_prepare(X, y, weights);
  check_arg(beta_std.size() == X.cols(), "elastic_net_objective: beta size mismatch");
  const Vector r = ws.yc - ws.Z * beta_std;
  const double quad = 0.5 * ws.wnorm.dot(r.cwiseProduct(r));
  const double pen =
      lambda * (alpha * beta_std.lpNorm<1>() + 0.5 * (1.0 - alpha) * beta_std.squaredNorm());
  return quad + pen;
}

/// Max KKT violation of the fitted solution on the standardized scale.
inline double elastic_net_kkt_residual(const Matrix& X, const Vector& y, const Vector& weights,
                                       const ElasticNetModel& model) {
  const detail::EnWorkspace ws = detail::en_prepare(X, y, weights);
  const Vector beta = model.std_coefficients();
  const Vector residual = ws.yc - ws.Z * beta;
  const double l1 = model.lambda * model.alpha;
  const double l2 = model.lambda * (1.0 - model.alpha);
  double kkt = 0.0;
  for (Index j : ws.active) {
    const double grad = -(ws.wnorm.cwiseProduct(ws.Z.col(j))).dot(residual) + l2 * beta[j];
    const double v = beta[j] != 0.0 ? std::abs(grad + l1 * (beta[j] > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(grad) - l1);
    kkt = std::max(kkt, v);
  }
  return kkt;
}

}  // namespace tauselect

#endif  // TAUSELECT_ELASTIC_NET_HPP_
