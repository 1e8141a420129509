#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataprism/sampling.hpp"
#include "dataprism/types.hpp"

namespace dataprism::stats {

/// Linear interpolation between closest ranks: position 1 + (q/100)(n-1) in
/// the ascending sort. q in [0,100].
double percentile(std::span<const double> values, double q);

double mean(std::span<const double> values);

/// Population standard deviation (divides by n).
double population_sd(std::span<const double> values);

/// Sample standard deviation (divides by n - 1). Needs n >= 2.
double sample_sd(std::span<const double> values);

/// Two-tailed p < 0.05 band of a bootstrap distribution.
struct BootstrapBounds {
  double lower = 0.0;  // 2.5th percentile
  double upper = 0.0;  // 97.5th percentile
  std::vector<double> trial_scores;

  /// Strictly outside [lower, upper].
  bool outside(double value) const { return value < lower || value > upper; }
};

inline constexpr std::size_t kMinStableTrials = 40;

/// Bounds at the 2.5/97.5 percentiles. Needs >= 2 trials; warns below
/// kMinStableTrials.
BootstrapBounds bootstrap_bounds(std::vector<double> trial_scores);

/// Aggregate (0-100) score of every model on every split: result[model][split].
std::vector<std::vector<double>> split_scores(const ScoreMatrix& matrix,
                                              std::span<const sampling::Split> splits);

struct ModelDimensionResult {
  std::string model_id;
  std::vector<double> split_scores;
  double sigma = 0.0;  // population sd of split_scores
  double range = 0.0;  // max - min
  int significant_count = 0;
};

struct DimensionReport {
  Dimension dimension = Dimension::ambiguity;
  std::vector<ModelDimensionResult> per_model;
  double mean_sigma = 0.0;
  double pct_significant = 0.0;
};

struct BootstrapReport {
  std::vector<std::string> model_ids;
  std::vector<BootstrapBounds> bounds;  // per model
  std::vector<DimensionReport> dimensions;
};

/// Per-model bounds from the random-split scores.
std::vector<BootstrapBounds> random_bounds(const ScoreMatrix& matrix,
                                           std::span<const sampling::Split> random_splits);

/// Scores each model on the stratified splits of one dimension and counts the
/// split scores outside that model's bounds.
DimensionReport f1_variance_dimension(const ScoreMatrix& matrix, Dimension dimension,
                                      std::span<const sampling::Split> decile_splits,
                                      std::span<const BootstrapBounds> bounds);

BootstrapReport f1_variance_report(
    const ScoreMatrix& matrix, std::span<const sampling::Split> random_splits,
    const std::map<Dimension, std::vector<sampling::Split>>& decile_splits);

/// Aggregate score per model, keyed by model id.
using ModelScores = std::map<std::string, double>;

ModelScores aggregate_by_model(const ScoreMatrix& matrix);

struct MetricDeltaReport {
  std::string metric_a;
  std::string metric_b;
  std::map<std::string, double> deltas;  // |a - b| per model, 0-100 scale
  double mean = 0.0;
  double sigma = 0.0;  // population sd of the per-model deltas
};

/// Both score maps must hold the same model set.
MetricDeltaReport metric_delta_report(const ModelScores& a, const ModelScores& b,
                                      std::string metric_a, std::string metric_b);
MetricDeltaReport metric_delta_report(const ScoreMatrix& a, const ScoreMatrix& b);

/// Tau-b over all pairs: (C - D) / sqrt((n0 - n1)(n0 - n2)). Returns 0 when
/// either side is entirely tied.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// Ranks with 1 = highest score; ties share the mean of their positions.
std::vector<double> rank_descending(std::span<const double> scores);

struct RankDimensionResult {
  Dimension dimension = Dimension::ambiguity;
  std::vector<double> taus;
  int significant_count = 0;
};

struct RankReport {
  std::vector<std::string> model_ids;
  std::vector<double> reference_ranking;  // mean rank per model over random splits
  BootstrapBounds tau_bounds;
  std::vector<RankDimensionResult> dimensions;
};

RankReport rank_variance_report(const ScoreMatrix& matrix,
                                std::span<const sampling::Split> random_splits,
                                const std::map<Dimension, std::vector<sampling::Split>>& decile_splits);

}  // namespace dataprism::stats
