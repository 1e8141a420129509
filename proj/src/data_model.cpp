#include "dataprism/data_model.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "dataprism/error.hpp"

namespace dataprism {

ValidationResult validate_join(const Dataset& dataset, const PredictionSet& preds) {
  ValidationResult result;
  std::unordered_set<std::string> dataset_ids;
  for (const auto& inst : dataset.instances) {
    dataset_ids.insert(inst.id);
    if (!preds.predictions.contains(inst.id)) result.missing.push_back(inst.id);
  }
  for (const auto& [id, _] : preds.predictions) {
    if (!dataset_ids.contains(id)) result.extraneous.push_back(id);
  }
  std::sort(result.missing.begin(), result.missing.end());
  std::sort(result.extraneous.begin(), result.extraneous.end());
  return result;
}

namespace {

void require_complete(const Dataset& dataset, const PredictionSet& preds) {
  const auto check = validate_join(dataset, preds);
  if (check.missing.empty()) {
    if (!check.extraneous.empty()) {
      warn("model '" + preds.model_id + "' has " + std::to_string(check.extraneous.size()) +
           " predictions for unknown instances (first: '" + check.extraneous.front() + "')");
    }
    return;
  }
  throw ValidationError("model '" + preds.model_id + "' is missing predictions for " +
                        std::to_string(check.missing.size()) + " instance(s), first: '" +
                        check.missing.front() + "'");
}

}  // namespace

std::vector<double> score_instances(const Dataset& dataset, const PredictionSet& preds,
                                    metrics::MetricKind metric) {
  require_complete(dataset, preds);
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset.instances) {
    out.push_back(metrics::score(metric, inst.task_kind, preds.predictions.at(inst.id), inst.gold));
  }
  return out;
}

ScoreMatrix build_score_matrix(const Dataset& dataset, std::span<const PredictionSet> all_preds,
                               metrics::MetricKind metric) {
  std::vector<std::string> model_ids;
  std::set<std::string> seen;
  std::vector<double> scores;
  scores.reserve(all_preds.size() * dataset.size());
  for (const auto& preds : all_preds) {
    if (!seen.insert(preds.model_id).second) {
      throw ValidationError("duplicate model id '" + preds.model_id + "'");
    }
    model_ids.push_back(preds.model_id);
    const auto row = score_instances(dataset, preds, metric);
    scores.insert(scores.end(), row.begin(), row.end());
  }
  std::vector<std::string> instance_ids;
  instance_ids.reserve(dataset.size());
  for (const auto& inst : dataset.instances) instance_ids.push_back(inst.id);
  return ScoreMatrix(std::move(model_ids), std::move(instance_ids), std::move(scores),
                     std::string(metrics::to_string(metric)));
}

double aggregate_score(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("cannot aggregate an empty score vector");
  double sum = 0.0;
  for (double s : scores) sum += s;
  return 100.0 * sum / static_cast<double>(scores.size());
}

irt::ResponseMatrix build_response_matrix(const Dataset& dataset,
                                          std::span<const PredictionSet> all_preds) {
  const auto metric = dataset.task_kind() == TaskKind::extractive_qa ? metrics::MetricKind::qa_exact
                                                                     : metrics::MetricKind::cls_accuracy;
  const ScoreMatrix scores = build_score_matrix(dataset, all_preds, metric);
  irt::ResponseMatrix m;
  m.model_ids = scores.model_ids();
  m.instance_ids = scores.instance_ids();
  m.responses.reserve(scores.num_models() * scores.num_instances());
  for (std::size_t j = 0; j < scores.num_models(); ++j) {
    for (double s : scores.row(j)) m.responses.push_back(s >= 0.5 ? 1 : 0);
  }
  return m;
}

}  // namespace dataprism
