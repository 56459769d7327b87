// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_SCENARIOS_HPP_
#define TAUSELECT_SCENARIOS_HPP_

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tauselect/dataset.hpp"

namespace tauselect {

enum class Assignment { randomized, biased };

inline std::string to_string(Assignment a) {
  return a == Assignment::randomized ? "randomized" : "biased";
}

inline Assignment assignment_from_string(const std::string& s) {
  if (s == "randomized") return Assignment::randomized;
  if (s == "biased") return Assignment::biased;
  throw std::invalid_argument("unknown assignment: " + s);
}

/// One simulation scenario. Scenarios 1-8 are randomized (p = 0.5), 9-16
/// reuse the same mean functions with biased assignment.
struct ScenarioSpec {
  int id = 0;
  int mean_fn_id = 0;  // 1..8, selects the (mu0, tau) pair
  Assignment assignment = Assignment::randomized;
  double noise_sd = 1.0;
  int covariate_dim = 12;
};

/// Per-row simulation truth, aligned with the sampled Dataset.
struct GroundTruth {
  Vector mu0;
  Vector mu1;
  Vector tau;
  Vector propensity;
};

inline GroundTruth subset(const GroundTruth& truth, const std::vector<Index>& idx) {
  const Index n = truth.mu0.size();
  GroundTruth out;
  out.mu0.resize(static_cast<Index>(idx.size()));
  out.mu1.resize(static_cast<Index>(idx.size()));
  out.tau.resize(static_cast<Index>(idx.size()));
  out.propensity.resize(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Index i = idx[k];
    check_arg(i >= 0 && i < n, "subset: index out of range");
    out.mu0[static_cast<Index>(k)] = truth.mu0[i];
    out.mu1[static_cast<Index>(k)] = truth.mu1[i];
    out.tau[static_cast<Index>(k)] = truth.tau[i];
    out.propensity[static_cast<Index>(k)] = truth.propensity[i];
  }
  return out;
}

namespace detail {

// Covariate law: x1..x8 ~ N(0,1), x9..x12 ~ Bernoulli(0.5), independent.
inline constexpr int kNumNormal = 8;
inline constexpr int kNumBinary = 4;
inline constexpr int kCovariateDim = kNumNormal + kNumBinary;

inline double indicator(bool b) { return b ? 1.0 : 0.0; }

// Baseline conditional mean mu0 for each mean-function pair. The eight pairs
// span linear, piecewise-constant, and smooth nonlinear shapes; see
// docs/scenarios.md for the catalog rationale.
inline double mu0_fn(int mean_fn_id, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  switch (mean_fn_id) {
    case 1: return std::sin(2.0 * x[0]) + 0.5 * x[1] * x[1] + x[8];
    case 2: return x[0] + 0.5 * x[1] - x[8];
    case 3: return 0.5 * x[0] - x[1] + x[9];
    case 4: return 2.0 * indicator(x[0] > 0.0) - indicator(x[1] > 1.0);
    case 5: return 2.0 * indicator(x[0] > 0.5) + indicator(x[1] < -0.5) + x[9];
    case 6: return 2.0 * std::sin(x[0]) + x[1];
    case 7: return x[0] * x[8] + std::cos(x[1]) + 0.5 * x[2];
    case 8: return std::log1p(std::exp(x[0])) + 0.5 * x[1];
    default: throw std::invalid_argument("mean_fn_id must be in 1..8");
  }
}

// Raw treatment effect for each pair. Pair 1 is the null effect; pairs 6 and
// 7 carry covariate interactions.
inline double tau_fn(int mean_fn_id, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  switch (mean_fn_id) {
    case 1: return 0.0;
    case 2: return 0.5 + 0.5 * x[2];
    case 3: return 1.0 + x[1] - 0.5 * x[3];
    case 4: return indicator(x[2] > 0.0) + x[8] - 0.75;
    case 5: return 2.0 * indicator(x[3] > 0.0) - 1.0;
    case 6: return 0.5 * x[0] * x[1];
    case 7: return x[0] * x[8] + 0.5 - x[8];
    case 8: return std::tanh(x[2]);
    default: throw std::invalid_argument("mean_fn_id must be in 1..8");
  }
}

// Linear score used by biased assignment; chosen per pair to correlate
// positively with mu0.
inline Eigen::RowVectorXd bias_score_coefficients(int mean_fn_id) {
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(kCovariateDim);
  switch (mean_fn_id) {
    case 1: c[0] = 1.0; c[8] = 1.0; break;
    case 2: c[0] = 1.0; c[1] = 0.5; c[8] = -1.0; break;
    case 3: c[0] = 0.5; c[1] = -1.0; c[9] = 1.0; break;
    case 4: c[0] = 1.0; c[1] = -0.5; break;
    case 5: c[0] = 1.0; c[1] = -1.0; c[9] = 1.0; break;
    case 6: c[0] = 1.0; c[1] = 1.0; break;
    case 7: c[0] = 0.5; c[2] = 0.5; c[8] = 1.0; break;
    case 8: c[0] = 1.0; c[1] = 0.5; break;
    default: throw std::invalid_argument("mean_fn_id must be in 1..8");
  }
  return c;
}

// Standardized linear score s(x): mean/variance are exact under the
// covariate law (normals: mean 0 var 1; binaries: mean 0.5 var 0.25).
inline double bias_score(int mean_fn_id, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const Eigen::RowVectorXd c = bias_score_coefficients(mean_fn_id);
  double mean = 0.0;
  double var = 0.0;
  for (int j = 0; j < kCovariateDim; ++j) {
    if (j < kNumNormal) {
      var += c[j] * c[j];
    } else {
      mean += 0.5 * c[j];
      var += 0.25 * c[j] * c[j];
    }
  }
  return (x.head(kCovariateDim).dot(c) - mean) / std::sqrt(var);
}

inline double biased_propensity(int mean_fn_id, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  const double s = bias_score(mean_fn_id, x);
  const double p = 1.0 / (1.0 + std::exp(-s));
  return std::clamp(p, 0.1, 0.9);
}

}  // namespace detail

inline void validate_spec(const ScenarioSpec& spec) {
  check_arg(spec.mean_fn_id >= 1 && spec.mean_fn_id <= 8, "ScenarioSpec: mean_fn_id must be in 1..8");
  check_arg(spec.noise_sd > 0.0, "ScenarioSpec: noise_sd must be positive");
  check_arg(spec.covariate_dim == detail::kCovariateDim, "ScenarioSpec: covariate_dim must be 12");
  if (spec.id >= 1 && spec.id <= 16) {
    const Assignment expected = spec.id <= 8 ? Assignment::randomized : Assignment::biased;
    check_arg(spec.assignment == expected, "ScenarioSpec: assignment inconsistent with id");
    check_arg(spec.mean_fn_id == (spec.id - 1) % 8 + 1, "ScenarioSpec: mean_fn_id inconsistent with id");
  }
}

/// The sixteen-scenario bank. Noise levels are fixed per mean-function pair.
inline const std::vector<ScenarioSpec>& default_catalog() {
  static const std::vector<ScenarioSpec> catalog = [] {
    const double noise[8] = {1.0, 0.5, 2.0, 0.5, 2.0, 0.5, 1.5, 1.0};
    std::vector<ScenarioSpec> c;
    for (int id = 1; id <= 16; ++id) {
      ScenarioSpec s;
      s.id = id;
      s.mean_fn_id = (id - 1) % 8 + 1;
      s.assignment = id <= 8 ? Assignment::randomized : Assignment::biased;
      s.noise_sd = noise[s.mean_fn_id - 1];
      s.covariate_dim = detail::kCovariateDim;
      c.push_back(s);
    }
    return c;
  }();
  return catalog;
}

inline const ScenarioSpec& scenario_by_id(int id) {
  check_arg(id >= 1 && id <= 16, "scenario id must be in 1..16");
  return default_catalog()[static_cast<std::size_t>(id - 1)];
}

/// True mu_arm(x) for every row of X. mu1 is defined as mu0 + tau_fn, and
/// oracle_tau as their difference, so tau == mu1 - mu0 holds bit-exactly.
inline Vector oracle_mu(const ScenarioSpec& spec, const Matrix& X, int arm) {
  validate_spec(spec);
  check_arg(arm == 0 || arm == 1, "oracle_mu: arm must be 0 or 1");
  check_arg(X.cols() == spec.covariate_dim, "oracle_mu: X has wrong column count");
  Vector out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    const double m0 = detail::mu0_fn(spec.mean_fn_id, X.row(i));
    out[i] = arm == 0 ? m0 : m0 + detail::tau_fn(spec.mean_fn_id, X.row(i));
  }
  return out;
}

inline Vector oracle_tau(const ScenarioSpec& spec, const Matrix& X) {
  return oracle_mu(spec, X, 1) - oracle_mu(spec, X, 0);
}

inline Vector oracle_propensity(const ScenarioSpec& spec, const Matrix& X) {
  validate_spec(spec);
  check_arg(X.cols() == spec.covariate_dim, "oracle_propensity: X has wrong column count");
  Vector p(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    p[i] = spec.assignment == Assignment::randomized
               ? 0.5
               : detail::biased_propensity(spec.mean_fn_id, X.row(i));
  }
  return p;
}

/// Draws a cohort of size n: X i.i.d. from the covariate law,
/// w_i ~ Bernoulli(p(x_i)), y_i = mu_{w_i}(x_i) + Normal(0, noise_sd^2).
inline std::pair<Dataset, GroundTruth> sample(const ScenarioSpec& spec, Index n,
                                              const RandomStream& stream) {
  validate_spec(spec);
  check_arg(n >= 2, "sample: n must be >= 2");

  Rng rng = stream.engine();
  Dataset data;
  data.X.resize(n, spec.covariate_dim);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < detail::kNumNormal; ++j) data.X(i, j) = rng.normal();
    for (int j = detail::kNumNormal; j < detail::kCovariateDim; ++j) {
      data.X(i, j) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
  }

  GroundTruth truth;
  truth.mu0 = oracle_mu(spec, data.X, 0);
  truth.mu1 = oracle_mu(spec, data.X, 1);
  truth.tau = truth.mu1 - truth.mu0;
  truth.propensity = oracle_propensity(spec, data.X);

  data.w.resize(n);
  for (Index i = 0; i < n; ++i) data.w[i] = rng.bernoulli(truth.propensity[i]) ? 1 : 0;
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double mean = data.w[i] == 1 ? truth.mu1[i] : truth.mu0[i];
    data.y[i] = mean + rng.normal(0.0, spec.noise_sd);
  }
  data.validate();
  return {std::move(data), std::move(truth)};
}

inline void write_catalog_json(const std::vector<ScenarioSpec>& catalog, std::ostream& os) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : catalog) {
    arr.push_back({{"id", s.id},
                   {"mean_fn_id", s.mean_fn_id},
                   {"assignment", to_string(s.assignment)},
                   {"noise_sd", s.noise_sd},
                   {"covariate_dim", s.covariate_dim}});
  }
  os << arr.dump(2) << "\n";
}

inline std::vector<ScenarioSpec> read_catalog_json(std::istream& is) {
  nlohmann::json arr = nlohmann::json::parse(is);
  std::vector<ScenarioSpec> catalog;
  for (const auto& item : arr) {
    ScenarioSpec s;
    s.id = item.at("id").get<int>();
    s.mean_fn_id = item.at("mean_fn_id").get<int>();
    s.assignment = assignment_from_string(item.at("assignment").get<std::string>());
    s.noise_sd = item.at("noise_sd").get<double>();
    s.covariate_dim = item.at("covariate_dim").get<int>();
    validate_spec(s);
    catalog.push_back(s);
  }
  return catalog;
}

/// CSV dump with ground-truth columns appended: x1..xd,w,y,mu0,mu1,tau,propensity.
inline void write_csv_with_truth(const Dataset& data, const GroundTruth& truth, std::ostream& os) {
  for (Index j = 0; j < data.d(); ++j) os << "x" << (j + 1) << ",";
  os << "w,y,mu0,mu1,tau,propensity\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.d(); ++j) os << format_double(data.X(i, j)) << ",";
    os << data.w[i] << "," << format_double(data.y[i]) << "," << format_double(truth.mu0[i]) << ","
       << format_double(truth.mu1[i]) << "," << format_double(truth.tau[i]) << ","
       << format_double(truth.propensity[i]) << "\n";
  }
}

}  // namespace tauselect

#endif  // TAUSELECT_SCENARIOS_HPP_
