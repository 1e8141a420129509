#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dataprism {

enum class TaskKind { classification, extractive_qa };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

struct Instance {
  std::string id;
  TaskKind task_kind = TaskKind::classification;
  std::string text_a;  // context / premise
  std::string text_b;  // question / hypothesis
  std::vector<std::string> gold;
  std::vector<std::string> annotator_labels;

  bool operator==(const Instance&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<Instance> instances;
  std::optional<std::string> domain_tag;

  TaskKind task_kind() const;
  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }

  bool operator==(const Dataset&) const = default;
};

using ClassProbabilities = std::map<std::string, double>;

struct PredictionSet {
  std::string model_id;
  std::unordered_map<std::string, std::string> predictions;
  std::unordered_map<std::string, ClassProbabilities> class_probabilities;

  bool operator==(const PredictionSet&) const = default;
};

/// Dense model x instance matrix of per-instance scores in [0,1].
/// Immutable once built; rows follow model_ids, columns follow instance_ids.
class ScoreMatrix {
 public:
  ScoreMatrix(std::vector<std::string> model_ids, std::vector<std::string> instance_ids,
              std::vector<double> scores, std::string metric_name);

  const std::vector<std::string>& model_ids() const { return model_ids_; }
  const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  const std::string& metric_name() const { return metric_name_; }

  std::size_t num_models() const { return model_ids_.size(); }
  std::size_t num_instances() const { return instance_ids_.size(); }

  double at(std::size_t model, std::size_t instance) const {
    return scores_[model * instance_ids_.size() + instance];
  }
  std::span<const double> row(std::size_t model) const {
    return {scores_.data() + model * instance_ids_.size(), instance_ids_.size()};
  }

  /// Column index of an instance id; throws ValidationError if unknown.
  std::size_t column_of(const std::string& instance_id) const;
  std::optional<std::size_t> row_of(const std::string& model_id) const;

 private:
  std::vector<std::string> model_ids_;
  std::vector<std::string> instance_ids_;
  std::vector<double> scores_;
  std::string metric_name_;
  std::unordered_map<std::string, std::size_t> column_index_;
};

// The six data dimensions, in canonical column order.
enum class Dimension { ambiguity, difficulty, discriminability, length, noise, perplexity };

inline constexpr std::size_t kNumDimensions = 6;
inline constexpr std::array<Dimension, kNumDimensions> kAllDimensions = {
    Dimension::ambiguity, Dimension::difficulty, Dimension::discriminability,
    Dimension::length,    Dimension::noise,      Dimension::perplexity};

std::string_view to_string(Dimension dim);
std::optional<Dimension> parse_dimension(std::string_view name);

struct ScalerParams {
  double clip_lo = 0.0;
  double clip_hi = 0.0;
  double min = 0.0;  // after clipping
  double max = 0.0;  // after clipping

  bool operator==(const ScalerParams&) const = default;
};

enum class Provenance { computed, ingested };

std::string_view to_string(Provenance p);

struct FeatureColumn {
  std::vector<double> raw;
  std::vector<double> scaled;
  ScalerParams scaler;
  Provenance provenance = Provenance::computed;

  bool operator==(const FeatureColumn&) const = default;
};

struct FeatureTable {
  std::vector<std::string> ids;
  std::array<FeatureColumn, kNumDimensions> columns;

  FeatureColumn& column(Dimension d) { return columns[static_cast<std::size_t>(d)]; }
  const FeatureColumn& column(Dimension d) const { return columns[static_cast<std::size_t>(d)]; }
  std::size_t size() const { return ids.size(); }

  /// Checks lengths, finiteness and the [0,1] range of scaled values.
  void validate() const;

  bool operator==(const FeatureTable&) const = default;
};

}  // namespace dataprism
