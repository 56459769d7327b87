// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_COMMON_HPP_
#define TAUSELECT_COMMON_HPP_

#include <cstdio>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tauselect {

inline constexpr const char* kVersion = "0.1.0";

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// A model cannot be scored under the requested metric (e.g. no outcome
/// predictors and no nuisance estimates to reconstruct them from).
class UnsupportedModelError : public std::runtime_error {
 public:
  explicit UnsupportedModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The metric is undefined on the given inputs (e.g. an empty arm among the
/// treated-by-policy group). The model is excluded from that metric's ranking.
class UndefinedScoreError : public std::runtime_error {
 public:
  explicit UndefinedScoreError(const std::string& msg) : std::runtime_error(msg) {}
};

/// No model could be scored under a metric.
class SelectionFailureError : public std::runtime_error {
 public:
  explicit SelectionFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void check_arg(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Shortest round-trippable decimal representation (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace tauselect

#endif  // TAUSELECT_COMMON_HPP_
