#include "dataprism/types.hpp"

#include <cmath>

#include "dataprism/error.hpp"

namespace dataprism {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification:
      return "classification";
    case TaskKind::extractive_qa:
      return "extractive_qa";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "classification") return TaskKind::classification;
  if (name == "extractive_qa") return TaskKind::extractive_qa;
  throw ValidationError("unknown task kind '" + std::string(name) + "'");
}

TaskKind Dataset::task_kind() const {
  if (instances.empty()) return TaskKind::classification;
  return instances.front().task_kind;
}

ScoreMatrix::ScoreMatrix(std::vector<std::string> model_ids, std::vector<std::string> instance_ids,
                         std::vector<double> scores, std::string metric_name)
    : model_ids_(std::move(model_ids)),
      instance_ids_(std::move(instance_ids)),
      scores_(std::move(scores)),
      metric_name_(std::move(metric_name)) {
  if (scores_.size() != model_ids_.size() * instance_ids_.size()) {
    throw ValidationError("score matrix has " + std::to_string(scores_.size()) + " entries, expected " +
                          std::to_string(model_ids_.size()) + " x " +
                          std::to_string(instance_ids_.size()));
  }
  for (double s : scores_) {
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("score matrix entry outside [0,1]");
  }
  column_index_.reserve(instance_ids_.size());
  for (std::size_t i = 0; i < instance_ids_.size(); ++i) {
    if (!column_index_.emplace(instance_ids_[i], i).second) {
      throw ValidationError("duplicate instance id '" + instance_ids_[i] + "' in score matrix");
    }
  }
}

std::size_t ScoreMatrix::column_of(const std::string& instance_id) const {
  auto it = column_index_.find(instance_id);
  if (it == column_index_.end()) {
    throw ValidationError("instance id '" + instance_id + "' not in score matrix");
  }
  return it->second;
}

std::optional<std::size_t> ScoreMatrix::row_of(const std::string& model_id) const {
  for (std::size_t j = 0; j < model_ids_.size(); ++j) {
    if (model_ids_[j] == model_id) return j;
  }
  return std::nullopt;
}

std::string_view to_string(Dimension dim) {
  switch (dim) {
    case Dimension::ambiguity:
      return "ambiguity";
    case Dimension::difficulty:
      return "difficulty";
    case Dimension::discriminability:
      return "discriminability";
    case Dimension::length:
      return "length";
    case Dimension::noise:
      return "noise";
    case Dimension::perplexity:
      return "perplexity";
  }
  return "unknown";
}

std::optional<Dimension> parse_dimension(std::string_view name) {
  for (Dimension d : kAllDimensions) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

std::string_view to_string(Provenance p) {
  return p == Provenance::computed ? "computed" : "ingested";
}

void FeatureTable::validate() const {
  for (Dimension d : kAllDimensions) {
    const auto& col = column(d);
    const std::string name(to_string(d));
    if (col.raw.size() != ids.size() || col.scaled.size() != ids.size()) {
      throw ValidationError("feature column '" + name + "' has wrong length");
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!std::isfinite(col.raw[i])) {
        throw ValidationError("non-finite raw " + name + " for '" + ids[i] + "'");
      }
      if (!(col.scaled[i] >= 0.0 && col.scaled[i] <= 1.0)) {
        throw ValidationError("scaled " + name + " outside [0,1] for '" + ids[i] + "'");
      }
    }
  }
}

}  // namespace dataprism
