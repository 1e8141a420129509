#pragma once

#include <span>
#include <string>
#include <vector>

#include "dataprism/irt.hpp"
#include "dataprism/metrics.hpp"
#include "dataprism/types.hpp"

namespace dataprism {

struct ValidationResult {
  std::vector<std::string> missing;     // in dataset, absent from predictions
  std::vector<std::string> extraneous;  // in predictions, absent from dataset

  bool ok() const { return missing.empty() && extraneous.empty(); }
};

/// Id-level join check. Both lists come back sorted.
ValidationResult validate_join(const Dataset& dataset, const PredictionSet& preds);

/// One score in [0,1] per instance, in dataset order. Missing predictions,
/// macro-F1, and metric/task mismatches throw ValidationError.
std::vector<double> score_instances(const Dataset& dataset, const PredictionSet& preds,
                                    metrics::MetricKind metric);

/// Rows follow the order of `all_preds`. Duplicate model ids throw.
ScoreMatrix build_score_matrix(const Dataset& dataset, std::span<const PredictionSet> all_preds,
                               metrics::MetricKind metric);

/// Mean x 100. Throws ValidationError on empty input.
double aggregate_score(std::span<const double> scores);

/// Binary correctness per model and instance: classification uses exact
/// label match, extractive QA uses qa_exact.
irt::ResponseMatrix build_response_matrix(const Dataset& dataset,
                                          std::span<const PredictionSet> all_preds);

}  // namespace dataprism
