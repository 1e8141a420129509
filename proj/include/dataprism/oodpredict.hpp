#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataprism/similarity.hpp"

namespace dataprism::ood {

/// Source score followed by the six signed SMD components.
inline constexpr std::size_t kNumInputs = 1 + kNumDimensions;
using InputVector = std::array<double, kNumInputs>;

using DatasetPair = std::pair<std::string, std::string>;  // (source, target)

struct OodInstance {
  InputVector x{};
  double y = 0.0;  // target score, 0-100
  DatasetPair pair;
  std::string model_id;
};

/// (model id, dataset name) -> score on the 0-100 scale.
using ScoreTable = std::map<std::pair<std::string, std::string>, double>;

struct PairSimilarity {
  DatasetPair pair;
  similarity::SimilarityVector sim;
};

/// One instance per (model, pair), models in score-table order and pairs in
/// input order. Every referenced score must exist.
std::vector<OodInstance> build_ood_instances(const ScoreTable& scores,
                                             std::span<const PairSimilarity> pairs);

struct Fold {
  std::vector<DatasetPair> held_out_pairs;
  std::vector<OodInstance> train;
  std::vector<OodInstance> test;
};

/// `repeats` folds; fold r holds out `holdout` distinct pairs drawn with
/// child_seed(seed, r) and puts all of their instances in test.
std::vector<Fold> split_by_pairs(std::span<const OodInstance> instances, std::size_t holdout,
                                 int repeats, std::uint64_t seed);

struct OodModel {
  InputVector weights{};
  double bias = 0.0;
  InputVector input_mean{};
  InputVector input_sd{};  // population sd of the training inputs
  std::size_t num_train = 0;
};

/// Least squares on centered inputs via ridge-stabilized normal equations
/// (ridge_eps added to the diagonal); the bias restores the means. Needs at
/// least kNumInputs + 1 rows.
OodModel fit_ols(std::span<const OodInstance> train, double ridge_eps = 1e-8);

double predict(const OodModel& model, std::span<const double> x);

/// Predicts the target score equals the source score.
double baseline_identity(std::span<const double> x);

struct Evaluation {
  double mad = 0.0;
  std::optional<double> r2;  // empty when the targets are constant
};

Evaluation evaluate(std::span<const double> predictions, std::span<const double> targets);

/// |w_k * sd_k| for the SMD inputs divided by the largest such value, i.e.
/// the weights a refit on standardized inputs would give, normalized.
std::array<double, kNumDimensions> feature_importance(const OodModel& model);

struct FoldResult {
  std::vector<DatasetPair> held_out_pairs;
  Evaluation model;
  Evaluation baseline;
  std::array<double, kNumDimensions> importance{};
};

struct OodReport {
  std::vector<FoldResult> folds;
  double mean_mad = 0.0;
  std::optional<double> mean_r2;
  double mean_baseline_mad = 0.0;
  std::optional<double> mean_baseline_r2;
  std::array<double, kNumDimensions> importance{};  // mean over folds
};

/// Fit, predict and score every fold against the identity baseline.
OodReport run_folds(std::span<const Fold> folds, double ridge_eps = 1e-8);

}  // namespace dataprism::ood
