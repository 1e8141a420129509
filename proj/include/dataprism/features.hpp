#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataprism/ingest.hpp"
#include "dataprism/types.hpp"

namespace dataprism::features {

/// PVI is reported in bits. Change here to switch the log base everywhere.
inline constexpr double kPviLogBase = 2.0;

/// Fraction clipped at each tail before min-max scaling.
inline constexpr double kClipFraction = 0.02;

/// Below this many values percentile clipping is skipped.
inline constexpr std::size_t kMinValuesForClipping = 50;

/// Number of maximal non-whitespace runs.
std::size_t count_tokens(std::string_view text);

/// QA: tokens of the context. Classification: tokens of premise + hypothesis.
double compute_length(const Instance& instance);

/// Dataset-cartography variability sqrt(V + V*V/(E-1)), V the population
/// variance of the per-epoch gold confidence. Needs E >= 2.
double compute_ambiguity(const TraceRecord& trace);

/// log2 p_full - log2 p_null.
double compute_difficulty(const PviRecord& record);

/// Inverse annotator agreement. Classification: 1 - majority share.
/// QA: 1 - mean pairwise token-F1 over unordered annotator pairs.
double compute_noise(const Instance& instance);

/// exp(-mean token log-probability).
double compute_perplexity(const PerplexityRecord& record);

/// Clip bounds are the 2nd/98th percentiles (linear interpolation) when there
/// are at least kMinValuesForClipping values, else the raw min/max.
ScalerParams fit_scaler(std::span<const double> raw);

/// Clip to [clip_lo, clip_hi], then map [min, max] to [0,1]. A degenerate
/// range maps everything to 0.5.
double scale(double raw, const ScalerParams& params);

// Dataset-level columns. Records are joined on instance id; a missing id is a
// ValidationError, records for unknown ids are ignored with a warning.
std::vector<double> length_column(const Dataset& dataset);
std::vector<double> noise_column(const Dataset& dataset);
std::vector<double> ambiguity_column(const Dataset& dataset, std::span<const TraceRecord> traces);
std::vector<double> difficulty_column(const Dataset& dataset, std::span<const PviRecord> records);
std::vector<double> perplexity_column(const Dataset& dataset,
                                      std::span<const PerplexityRecord> records);
std::vector<double> ingested_column(const Dataset& dataset, std::span<const ColumnRecord> records);

/// True if every instance carries at least two annotator labels.
bool noise_computable(const Dataset& dataset);

struct RawColumn {
  std::vector<double> values;
  Provenance provenance = Provenance::computed;
};

/// Fits a scaler per dimension and fills the scaled values. All six columns
/// must be present and match `ids` in length.
FeatureTable assemble_table(std::vector<std::string> ids,
                            std::array<std::optional<RawColumn>, kNumDimensions> columns);

/// Pearson correlation between scaled columns; nullopt where a column is
/// constant.
using CorrelationMatrix = std::array<std::array<std::optional<double>, kNumDimensions>, kNumDimensions>;
CorrelationMatrix correlation_matrix(const FeatureTable& table);

}  // namespace dataprism::features
