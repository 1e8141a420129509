#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataprism/types.hpp"

namespace dataprism::metrics {

enum class MetricKind { qa_token_f1, qa_exact, cls_accuracy, cls_macro_f1 };

std::string_view to_string(MetricKind kind);
std::optional<MetricKind> parse_metric(std::string_view name);

/// True when the metric is defined for the task.
bool applicable(MetricKind kind, TaskKind task);

/// True for metrics that decompose into per-instance scores. cls_macro_f1
/// is aggregate-only.
bool per_instance(MetricKind kind);

/// SQuAD-style answer normalization: lowercase (ASCII), drop Unicode
/// punctuation (general category P*), drop the articles a/an/the, split on
/// whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

/// Max over golds of token-multiset F1 against the normalized prediction.
double qa_token_f1(std::string_view prediction, std::span<const std::string> golds);

/// 1 iff the normalized prediction equals some normalized gold.
double qa_exact(std::string_view prediction, std::span<const std::string> golds);

double cls_accuracy(std::string_view prediction, std::span<const std::string> golds);

/// Unweighted mean of per-label F1 over the label set golds U predictions.
/// Returns 1.0 for empty input.
double cls_macro_f1(std::span<const std::string> predictions, std::span<const std::string> golds);

/// Per-instance score dispatch. Throws ValidationError for cls_macro_f1 or a
/// metric not applicable to the task.
double score(MetricKind kind, TaskKind task, std::string_view prediction,
             std::span<const std::string> golds);

}  // namespace dataprism::metrics
