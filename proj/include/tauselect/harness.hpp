// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_HARNESS_HPP_
#define TAUSELECT_HARNESS_HPP_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tauselect/evaluation.hpp"
#include "tauselect/matching.hpp"
#include "tauselect/metrics.hpp"
#include "tauselect/nuisance.hpp"

namespace tauselect {

/// Full experiment configuration. Desk-scale defaults (20 replications,
/// 500/500/500 splits) keep a complete sixteen-scenario run tractable; the
/// paper-scale run (100 replications, 1000/1000/1000) sits behind a flag in
/// the CLI.
struct ExperimentConfig {
  std::vector<int> scenarios = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
  int replications = 20;
  std::array<Index, 3> split_sizes = {500, 500, 500};
  std::uint64_t master_seed = 20260809;
  std::vector<MetricId> metrics = all_metrics();
  int folds = 5;
  bool use_known_propensity = true;  // use p = 0.5 for randomized scenarios
  CandidateGrid grid;
  int jobs = 1;
  std::string out_dir = "out";

  void validate() const {
    check_arg(!scenarios.empty(), "config: scenarios must be non-empty");
    for (int s : scenarios) check_arg(s >= 1 && s <= 16, "config: scenario ids must be in 1..16");
    check_arg(replications >= 1, "config: replications must be >= 1");
    for (Index s : split_sizes) check_arg(s >= 50, "config: each split size must be >= 50");
    check_arg(!metrics.empty(), "config: metrics must be non-empty");
    check_arg(folds >= 2, "config: folds must be >= 2");
    check_arg(jobs >= 1, "config: jobs must be >= 1");
    grid.validate();
  }
};

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["scenarios"] = cfg.scenarios;
  j["replications"] = cfg.replications;
  j["split_sizes"] = cfg.split_sizes;
  j["master_seed"] = cfg.master_seed;
  std::vector<std::string> metric_names;
  for (MetricId m : cfg.metrics) metric_names.push_back(to_string(m));
  j["metrics"] = metric_names;
  j["folds"] = cfg.folds;
  j["use_known_propensity"] = cfg.use_known_propensity;
  j["en_lambdas"] = cfg.grid.lambdas;
  j["en_alpha"] = cfg.grid.en.alpha;
  j["gbt_tree_counts"] = cfg.grid.tree_counts;
  j["gbt_depth"] = cfg.grid.gbt.depth;
  j["gbt_shrinkage"] = cfg.grid.gbt.shrinkage;
  j["gbt_min_node"] = cfg.grid.gbt.min_node;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("scenarios")) cfg.scenarios = j.at("scenarios").get<std::vector<int>>();
  if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
  if (j.contains("split_sizes")) {
    const auto sizes = j.at("split_sizes").get<std::vector<Index>>();
    check_arg(sizes.size() == 3, "config: split_sizes must have 3 entries");
    cfg.split_sizes = {sizes[0], sizes[1], sizes[2]};
  }
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("metrics")) {
    cfg.metrics.clear();
    for (const auto& name : j.at("metrics")) cfg.metrics.push_back(metric_from_string(name));
  }
  if (j.contains("folds")) cfg.folds = j.at("folds").get<int>();
  if (j.contains("use_known_propensity")) {
    cfg.use_known_propensity = j.at("use_known_propensity").get<bool>();
  }
  if (j.contains("en_lambdas")) cfg.grid.lambdas = j.at("en_lambdas").get<std::vector<double>>();
  if (j.contains("en_alpha")) cfg.grid.en.alpha = j.at("en_alpha").get<double>();
  if (j.contains("gbt_tree_counts")) {
    cfg.grid.tree_counts = j.at("gbt_tree_counts").get<std::vector<int>>();
  }
  if (j.contains("gbt_depth")) cfg.grid.gbt.depth = j.at("gbt_depth").get<int>();
  if (j.contains("gbt_shrinkage")) cfg.grid.gbt.shrinkage = j.at("gbt_shrinkage").get<double>();
  if (j.contains("gbt_min_node")) cfg.grid.gbt.min_node = j.at("gbt_min_node").get<int>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

inline ExperimentConfig load_config(std::istream& is) {
  return config_from_json(nlohmann::json::parse(is));
}

struct ModelRecord {
  MetaLearner meta = MetaLearner::S;
  AlgoSpec algo;
  std::vector<std::optional<double>> scores;  // aligned with config.metrics
  double test_tau_risk = 0.0;
  double test_value = 0.0;
};

struct SelectionRecord {
  MetricId metric = MetricId::random;
  std::size_t model_id = 0;
  double tau_risk_test = 0.0;
  double value_test = 0.0;
};

struct ReplicationRecord {
  int scenario = 0;
  int replication = 0;
  bool failed = false;
  std::string failure_reason;
  std::vector<ModelRecord> models;
  std::vector<SelectionRecord> selections;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;
};

/// One cell of the experiment: sample, split, fit all candidates, score every
/// metric, select per metric, and evaluate against ground truth on the test
/// set. Deterministic given (master_seed, scenario, replication_index).
inline ReplicationRecord run_replication(const ScenarioSpec& spec, int replication_index,
                                         const ExperimentConfig& cfg) {
  ReplicationRecord rec;
  rec.scenario = spec.id;
  rec.replication = replication_index;

  const RandomStream base = RandomStream(cfg.master_seed)
                                .child("scenario")
                                .child(spec.id)
                                .child("rep")
                                .child(replication_index);
  const Index n_total = cfg.split_sizes[0] + cfg.split_sizes[1] + cfg.split_sizes[2];

  auto [data, truth] = sample(spec, n_total, base.child("sample"));
  const SplitIndices splits = make_splits(n_total, cfg.split_sizes, base.child("split"));
  const Dataset train = subset(data, splits.train);
  const Dataset val = subset(data, splits.validation);
  const Dataset test = subset(data, splits.test);
  const GroundTruth truth_test = subset(truth, splits.test);

  std::optional<double> known_p;
  if (cfg.use_known_propensity && spec.assignment == Assignment::randomized) known_p = 0.5;

  const auto [m_hat, p_hat] =
      cross_estimate_mp(train, cfg.folds, cfg.grid, base.child("train_nuisance"), known_p);
  const std::vector<TauModel> models = fit_all_models(train, cfg.grid, m_hat, p_hat);

  const NuisanceEstimates nuis =
      cross_estimate(val, cfg.folds, cfg.grid, base.child("val_nuisance"), known_p);
  const MatchAssignment match = mahalanobis_match(val);

  rec.models.resize(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    ModelRecord& mr = rec.models[k];
    mr.meta = models[k].meta;
    mr.algo = models[k].algo;
    const TauPredictions pred = predict_on(models[k], val.X);
    mr.scores.resize(cfg.metrics.size());
    for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
      if (cfg.metrics[mi] == MetricId::random) continue;
      mr.scores[mi] = try_score_metric(cfg.metrics[mi], pred, val, nuis, match);
    }
    const Vector tau_test = models[k].predict_tau(test.X);
    mr.test_tau_risk = test_tau_risk(tau_test, truth_test);
    mr.test_value = test_value(tau_test, truth_test);
  }

  for (std::size_t mi = 0; mi < cfg.metrics.size(); ++mi) {
    const MetricId metric = cfg.metrics[mi];
    std::size_t chosen;
    if (metric == MetricId::random) {
      Rng rng = base.child("random_select").engine();
      chosen = static_cast<std::size_t>(rng.uniform_index(models.size()));
    } else {
      std::vector<std::optional<double>> column(models.size());
      for (std::size_t k = 0; k < models.size(); ++k) column[k] = rec.models[k].scores[mi];
      chosen = select_from_scores(column, metric);
    }
    rec.selections.push_back(SelectionRecord{metric, chosen, rec.models[chosen].test_tau_risk,
                                             rec.models[chosen].test_value});
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Aggregation

/// Flat per-selection record; the unit the aggregate fold runs over.
struct SelectionRow {
  int scenario = 0;
  int replication = 0;
  std::string metric;
  int model_id = 0;
  double tau_risk_test = 0.0;
  double value_test = 0.0;
};

struct SummaryRow {
  std::string metric;
  int scenario = 0;
  int replications = 0;
  double mean_tau_risk = 0.0;
  double se_tau_risk = 0.0;
  int wins_tau_risk = 0;
  double mean_value = 0.0;
  double se_value = 0.0;
  int wins_value = 0;
};

inline std::vector<SelectionRow> selection_rows(const ExperimentReport& report) {
  std::vector<SelectionRow> rows;
  for (const ReplicationRecord& rec : report.records) {
    if (rec.failed) continue;
    for (const SelectionRecord& sel : rec.selections) {
      rows.push_back(SelectionRow{rec.scenario, rec.replication, to_string(sel.metric),
                                  static_cast<int>(sel.model_id), sel.tau_risk_test,
                                  sel.value_test});
    }
  }
  return rows;
}

/// Per (metric, scenario): mean and standard error of the true test-set
/// metrics over replications, plus win counts (replications where the metric
/// attains the best test result among all metrics; ties count for all).
/// Cells with no successful replication are simply absent.
inline std::vector<SummaryRow> aggregate(const std::vector<SelectionRow>& rows,
                                         const std::vector<std::string>& metric_order,
                                         const std::vector<int>& scenario_order) {
  std::map<std::pair<std::string, int>, std::vector<const SelectionRow*>> cells;
  std::map<std::pair<int, int>, std::vector<const SelectionRow*>> by_replication;
  for (const SelectionRow& row : rows) {
    cells[{row.metric, row.scenario}].push_back(&row);
    by_replication[{row.scenario, row.replication}].push_back(&row);
  }

  std::map<std::pair<std::string, int>, std::pair<int, int>> wins;  // (tau, value)
  for (const auto& [key, group] : by_replication) {
    double best_tau = std::numeric_limits<double>::infinity();
    double best_value = -std::numeric_limits<double>::infinity();
    for (const SelectionRow* row : group) {
      best_tau = std::min(best_tau, row->tau_risk_test);
      best_value = std::max(best_value, row->value_test);
    }
    for (const SelectionRow* row : group) {
      auto& w = wins[{row->metric, row->scenario}];
      if (row->tau_risk_test == best_tau) w.first++;
      if (row->value_test == best_value) w.second++;
    }
  }

  auto mean_se = [](const std::vector<const SelectionRow*>& group, auto accessor) {
    const int n = static_cast<int>(group.size());
    double mean = 0.0;
    for (const SelectionRow* row : group) mean += accessor(*row);
    mean /= n;
    double var = 0.0;
    for (const SelectionRow* row : group) {
      const double d = accessor(*row) - mean;
      var += d * d;
    }
    const double se = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    return std::pair<double, double>{mean, se};
  };

  std::vector<SummaryRow> out;
  for (const std::string& metric : metric_order) {
    for (int scenario : scenario_order) {
      const auto it = cells.find({metric, scenario});
      if (it == cells.end()) continue;  // missing cell, not fabricated
      SummaryRow row;
      row.metric = metric;
      row.scenario = scenario;
      row.replications = static_cast<int>(it->second.size());
      const auto [mt, st] =
          mean_se(it->second, [](const SelectionRow& r) { return r.tau_risk_test; });
      const auto [mv, sv] = mean_se(it->second, [](const SelectionRow& r) { return r.value_test; });
      row.mean_tau_risk = mt;
      row.se_tau_risk = st;
      row.mean_value = mv;
      row.se_value = sv;
      const auto wit = wins.find({metric, scenario});
      if (wit != wins.end()) {
        row.wins_tau_risk = wit->second.first;
        row.wins_value = wit->second.second;
      }
      out.push_back(row);
    }
  }
  return out;
}

/// Aggregation with the ordering implied by the rows themselves (first
/// appearance order for metrics, ascending scenarios).
inline std::vector<SummaryRow> aggregate(const std::vector<SelectionRow>& rows) {
  std::vector<std::string> metric_order;
  std::vector<int> scenario_order;
  for (const SelectionRow& row : rows) {
    if (std::find(metric_order.begin(), metric_order.end(), row.metric) == metric_order.end()) {
      metric_order.push_back(row.metric);
    }
    if (std::find(scenario_order.begin(), scenario_order.end(), row.scenario) ==
        scenario_order.end()) {
      scenario_order.push_back(row.scenario);
    }
  }
  std::sort(scenario_order.begin(), scenario_order.end());
  return aggregate(rows, metric_order, scenario_order);
}

// ---------------------------------------------------------------------------
// Output files

inline void write_raw_scores_csv(const ExperimentReport& report, std::ostream& os) {
  os << "scenario,replication,metric,model_id,meta_learner,algo,hyper,score\n";
  const auto& metrics = report.config.metrics;
  for (const ReplicationRecord& rec : report.records) {
    if (rec.failed) continue;
    for (std::size_t k = 0; k < rec.models.size(); ++k) {
      const ModelRecord& mr = rec.models[k];
      const std::string prefix = std::to_string(rec.scenario) + "," +
                                 std::to_string(rec.replication) + ",";
      const std::string model_cols = std::to_string(k) + "," + to_string(mr.meta) + "," +
                                     to_string(mr.algo.family) + "," + mr.algo.hyper() + ",";
      for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
        if (metrics[mi] == MetricId::random) continue;
        os << prefix << to_string(metrics[mi]) << "," << model_cols
           << (mr.scores[mi].has_value() ? format_double(*mr.scores[mi]) : "NA") << "\n";
      }
      os << prefix << "test_tau_risk," << model_cols << format_double(mr.test_tau_risk) << "\n";
      os << prefix << "test_value," << model_cols << format_double(mr.test_value) << "\n";
    }
  }
}

inline void write_selections_csv(const ExperimentReport& report, std::ostream& os) {
  os << "scenario,replication,metric,model_id,meta_learner,algo,hyper,tau_risk_test,value_test\n";
  for (const ReplicationRecord& rec : report.records) {
    if (rec.failed) continue;
    for (const SelectionRecord& sel : rec.selections) {
      const ModelRecord& mr = rec.models[sel.model_id];
      os << rec.scenario << "," << rec.replication << "," << to_string(sel.metric) << ","
         << sel.model_id << "," << to_string(mr.meta) << "," << to_string(mr.algo.family) << ","
         << mr.algo.hyper() << "," << format_double(sel.tau_risk_test) << ","
         << format_double(sel.value_test) << "\n";
    }
  }
}

inline std::vector<SelectionRow> read_selections_csv(std::istream& is) {
  std::vector<SelectionRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    SelectionRow row;
    std::getline(ss, field, ',');
    row.scenario = std::stoi(field);
    std::getline(ss, field, ',');
    row.replication = std::stoi(field);
    std::getline(ss, row.metric, ',');
    std::getline(ss, field, ',');
    row.model_id = std::stoi(field);
    std::getline(ss, field, ',');  // meta_learner
    std::getline(ss, field, ',');  // algo
    std::getline(ss, field, ',');  // hyper
    std::getline(ss, field, ',');
    row.tau_risk_test = std::stod(field);
    std::getline(ss, field, ',');
    row.value_test = std::stod(field);
    rows.push_back(row);
  }
  return rows;
}

/// Wide Table-1/2 style summary: one row per metric, one column per scenario.
inline void write_summary_wide_csv(const std::vector<SummaryRow>& summary,
                                   const std::vector<std::string>& metric_order,
                                   const std::vector<int>& scenario_order, bool value,
                                   std::ostream& os) {
  os << "metric";
  for (int s : scenario_order) os << ",s" << s;
  os << "\n";
  std::map<std::pair<std::string, int>, const SummaryRow*> cells;
  for (const SummaryRow& row : summary) cells[{row.metric, row.scenario}] = &row;
  for (const std::string& metric : metric_order) {
    os << metric;
    for (int s : scenario_order) {
      const auto it = cells.find({metric, s});
      os << ",";
      if (it != cells.end()) {
        os << format_double(value ? it->second->mean_value : it->second->mean_tau_risk);
      } else {
        os << "NA";
      }
    }
    os << "\n";
  }
}

inline void write_summary_stats_csv(const std::vector<SummaryRow>& summary, std::ostream& os) {
  os << "metric,scenario,replications,mean_tau_risk,se_tau_risk,wins_tau_risk,"
        "mean_value,se_value,wins_value\n";
  for (const SummaryRow& row : summary) {
    os << row.metric << "," << row.scenario << "," << row.replications << ","
       << format_double(row.mean_tau_risk) << "," << format_double(row.se_tau_risk) << ","
       << row.wins_tau_risk << "," << format_double(row.mean_value) << ","
       << format_double(row.se_value) << "," << row.wins_value << "\n";
  }
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file: " + path.string());
  return os;
}

}  // namespace detail

/// Writes raw_scores.csv, selections.csv, the two wide summaries, the long
/// summary, and manifest.json into cfg.out_dir.
inline void write_outputs(const ExperimentReport& report) {
  const std::filesystem::path dir(report.config.out_dir);
  std::filesystem::create_directories(dir);

  {
    auto os = detail::open_output(dir / "raw_scores.csv");
    write_raw_scores_csv(report, os);
  }
  {
    auto os = detail::open_output(dir / "selections.csv");
    write_selections_csv(report, os);
  }

  std::vector<std::string> metric_order;
  for (MetricId m : report.config.metrics) metric_order.push_back(to_string(m));
  std::vector<int> scenario_order = report.config.scenarios;
  std::sort(scenario_order.begin(), scenario_order.end());

  const std::vector<SummaryRow> summary =
      aggregate(selection_rows(report), metric_order, scenario_order);
  {
    auto os = detail::open_output(dir / "summary_tau_risk.csv");
    write_summary_wide_csv(summary, metric_order, scenario_order, /*value=*/false, os);
  }
  {
    auto os = detail::open_output(dir / "summary_value.csv");
    write_summary_wide_csv(summary, metric_order, scenario_order, /*value=*/true, os);
  }
  {
    auto os = detail::open_output(dir / "summary_stats.csv");
    write_summary_stats_csv(summary, os);
  }

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config_to_json(report.config);
  manifest["cells_total"] = report.records.size();
  nlohmann::json failures = nlohmann::json::array();
  for (const ReplicationRecord& rec : report.records) {
    if (rec.failed) {
      failures.push_back({{"scenario", rec.scenario},
                          {"replication", rec.replication},
                          {"reason", rec.failure_reason}});
    }
  }
  manifest["failures"] = failures;
  {
    auto os = detail::open_output(dir / "manifest.json");
    os << manifest.dump(2) << "\n";
  }
}

/// Runs every (scenario, replication) cell, possibly concurrently, and writes
/// all outputs. Cell results are deposited by index, so the report and the
/// CSVs are byte-identical regardless of the parallelism degree.
inline ExperimentReport run(const ExperimentConfig& cfg) {
  cfg.validate();

  // Fail before any computation if the output directory is unusable.
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  detail::open_output(dir / "raw_scores.csv") << "";

  struct Cell {
    int scenario;
    int replication;
  };
  std::vector<Cell> cells;
  for (int s : cfg.scenarios) {
    for (int r = 0; r < cfg.replications; ++r) cells.push_back({s, r});
  }

  ExperimentReport report;
  report.config = cfg;
  report.records.resize(cells.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) break;
      const ScenarioSpec& spec = scenario_by_id(cells[k].scenario);
      try {
        report.records[k] = run_replication(spec, cells[k].replication, cfg);
      } catch (const std::exception& e) {
        ReplicationRecord rec;
        rec.scenario = cells[k].scenario;
        rec.replication = cells[k].replication;
        rec.failed = true;
        rec.failure_reason = e.what();
        report.records[k] = rec;
      }
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), cells.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  write_outputs(report);
  return report;
}

}  // namespace tauselect

#endif  // TAUSELECT_HARNESS_HPP_
