#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dataprism/types.hpp"

namespace dataprism {

/// Per-epoch probability assigned to the gold answer.
struct TraceRecord {
  std::string id;
  std::vector<double> gold_conf;

  bool operator==(const TraceRecord&) const = default;
};

/// Gold-answer probability under the full-input and the null-input model.
struct PviRecord {
  std::string id;
  double p_full = 1.0;
  double p_null = 1.0;

  bool operator==(const PviRecord&) const = default;
};

/// Natural-log probabilities of the conditioned target tokens.
struct PerplexityRecord {
  std::string id;
  std::vector<double> token_logprobs;

  bool operator==(const PerplexityRecord&) const = default;
};

/// Precomputed raw values for one dimension, {"id","value"} per line.
struct ColumnRecord {
  std::string id;
  double value = 0.0;
};

}  // namespace dataprism

namespace dataprism::ingest {

inline constexpr const char* kSchemaVersion = "1";

// All parsers read JSON Lines. Blank lines are skipped. Errors are thrown as
// ValidationError (schema/invariant, message carries "path:line") or IoError.

Dataset parse_instances(const std::filesystem::path& path, TaskKind task_kind);
void write_instances(const Dataset& dataset, const std::filesystem::path& path);

/// model_id comes from a header line {"model_id": ...} without an "id"
/// field, otherwise from the filename stem.
PredictionSet parse_predictions(const std::filesystem::path& path);
void write_predictions(const PredictionSet& preds, const std::filesystem::path& path);

/// Every *.jsonl file in the directory, sorted by filename.
std::vector<PredictionSet> parse_predictions_dir(const std::filesystem::path& dir);

std::vector<TraceRecord> parse_traces(const std::filesystem::path& path);
std::vector<PviRecord> parse_pvi(const std::filesystem::path& path);
std::vector<PerplexityRecord> parse_perplexity(const std::filesystem::path& path);
std::vector<ColumnRecord> parse_column(const std::filesystem::path& path);

void write_traces(const std::vector<TraceRecord>& records, const std::filesystem::path& path);
void write_pvi(const std::vector<PviRecord>& records, const std::filesystem::path& path);
void write_perplexity(const std::vector<PerplexityRecord>& records,
                      const std::filesystem::path& path);

/// "<dir>/<stem>.scaler.json" for "<dir>/<stem>.jsonl".
std::filesystem::path scaler_sidecar_path(const std::filesystem::path& features_path);

/// Writes features.jsonl plus the scaler side-car. `seed` is recorded in the
/// side-car when present.
void write_feature_table(const FeatureTable& table, const std::filesystem::path& path,
                         std::optional<std::uint64_t> seed = std::nullopt);

/// Reads a table written by write_feature_table. Without a side-car, scaler
/// parameters are refit from the raw values and columns are marked ingested.
FeatureTable read_feature_table(const std::filesystem::path& path);

/// Flat CSV export: id followed by <dim>_raw,<dim>_scaled for all six.
void write_feature_table_csv(const FeatureTable& table, const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace dataprism::ingest
