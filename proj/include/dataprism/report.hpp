#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dataprism/irt.hpp"
#include "dataprism/metrics.hpp"
#include "dataprism/types.hpp"

namespace dataprism::report {

inline constexpr const char* kReportVersion = "1";

enum class OutputFormat { json, csv };

struct RunConfig {
  TaskKind task = TaskKind::extractive_qa;
  std::optional<std::filesystem::path> instances;
  std::optional<std::filesystem::path> predictions_dir;
  std::optional<std::filesystem::path> traces;
  std::optional<std::filesystem::path> pvi;
  std::optional<std::filesystem::path> ppl;
  std::optional<std::filesystem::path> features;
  std::vector<std::pair<Dimension, std::filesystem::path>> columns;  // precomputed raw columns
  std::optional<metrics::MetricKind> metric;  // defaults per task
  int bins = 10;
  int trials = 200;
  double fraction = 0.10;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  OutputFormat format = OutputFormat::csv;
  irt::FitConfig irt;

  /// Seed presence and existence of every referenced input path.
  void validate() const;
  metrics::MetricKind resolved_metric() const;
  std::uint64_t master_seed() const;
};

/// features.jsonl, its scaler side-car and correlations.{csv,json}.
/// Each dimension is computed from its source when available, otherwise taken
/// from an explicit column file or the --features table, otherwise an error.
FeatureTable cmd_features(const RunConfig& config);

/// bootstrap_report.json, rank_report.json, metric_delta.json and
/// decile_curves.{csv,json}.
void cmd_analyze(const RunConfig& config);

struct CompareOptions {
  std::filesystem::path features_a;
  std::filesystem::path features_b;
  std::optional<std::string> name_a;  // default: file stem
  std::optional<std::string> name_b;
  std::vector<double> subsample_fractions;  // adds in-distribution baselines
  int trials = 20;
};

/// similarity.json.
void cmd_compare(const RunConfig& config, const CompareOptions& options);

struct PredictOodOptions {
  std::filesystem::path scores;  // {"model_id","dataset","score"} per line
  std::filesystem::path pairs;   // {"a","b","smd":{...}} per line
  std::size_t holdout = 1;
  int repeats = 5;
  double ridge_eps = 1e-8;
};

/// ood_report.json.
void cmd_predict_ood(const RunConfig& config, const PredictOodOptions& options);

/// compare_models.{csv,json}: per bin, both scores and their difference.
void cmd_compare_models(const RunConfig& config, const std::string& model_1,
                        const std::string& model_2, Dimension dimension);

/// splits.jsonl with the stratified splits of every dimension followed by the
/// random splits.
void cmd_sample(const RunConfig& config);

}  // namespace dataprism::report
