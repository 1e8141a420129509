#include "dataprism/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "dataprism/error.hpp"
#include "dataprism/metrics.hpp"
#include "dataprism/stats.hpp"

namespace dataprism::features {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

// Looks up one record per instance, in dataset order.
template <typename Record, typename Fn>
std::vector<double> join_column(const Dataset& dataset, std::span<const Record> records,
                                const char* what, Fn&& compute) {
  std::unordered_map<std::string, const Record*> by_id;
  by_id.reserve(records.size());
  for (const auto& r : records) by_id.emplace(r.id, &r);
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset.instances) {
    auto it = by_id.find(inst.id);
    if (it == by_id.end()) {
      throw ValidationError(std::string(what) + " record missing for instance '" + inst.id + "'");
    }
    out.push_back(compute(*it->second));
  }
  if (by_id.size() > dataset.size()) {
    warn(std::to_string(records.size()) + " " + what + " records for " +
         std::to_string(dataset.size()) + " instances; extra ids ignored");
  }
  return out;
}

}  // namespace

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = is_space(static_cast<unsigned char>(c));
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

double compute_length(const Instance& instance) {
  std::size_t n = count_tokens(instance.text_a);
  if (instance.task_kind == TaskKind::classification) n += count_tokens(instance.text_b);
  return static_cast<double>(n);
}

double compute_ambiguity(const TraceRecord& trace) {
  const auto& conf = trace.gold_conf;
  if (conf.size() < 2) {
    throw ValidationError("ambiguity for '" + trace.id + "' needs at least 2 epochs");
  }
  const double m = stats::mean(conf);
  double var = 0.0;
  for (double c : conf) var += (c - m) * (c - m);
  var /= static_cast<double>(conf.size());
  return std::sqrt(var + var * var / static_cast<double>(conf.size() - 1));
}

double compute_difficulty(const PviRecord& record) {
  if (!(record.p_full > 0.0) || !(record.p_null > 0.0)) {
    throw ValidationError("PVI for '" + record.id + "' needs positive probabilities");
  }
  const double log_base = std::log(kPviLogBase);
  return (std::log(record.p_full) - std::log(record.p_null)) / log_base;
}

double compute_noise(const Instance& instance) {
  const auto& labels = instance.annotator_labels;
  if (labels.size() < 2) {
    throw ValidationError("noise for '" + instance.id + "' needs at least 2 annotator labels");
  }
  if (instance.task_kind == TaskKind::classification) {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    std::size_t majority = 0;
    for (const auto& [_, c] : counts) majority = std::max(majority, c);
    return 1.0 - static_cast<double>(majority) / static_cast<double>(labels.size());
  }
  double agreement = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t k = i + 1; k < labels.size(); ++k) {
      agreement += metrics::qa_token_f1(labels[i], std::span<const std::string>(&labels[k], 1));
      ++pairs;
    }
  }
  return 1.0 - agreement / static_cast<double>(pairs);
}

double compute_perplexity(const PerplexityRecord& record) {
  if (record.token_logprobs.empty()) {
    throw ValidationError("perplexity for '" + record.id + "' needs at least one token");
  }
  double sum = 0.0;
  for (double lp : record.token_logprobs) {
    if (lp > 0.0) throw ValidationError("positive token log-probability for '" + record.id + "'");
    sum += lp;
  }
  return std::exp(-sum / static_cast<double>(record.token_logprobs.size()));
}

ScalerParams fit_scaler(std::span<const double> raw) {
  if (raw.empty()) throw ValidationError("cannot fit a scaler on an empty column");
  ScalerParams p;
  if (raw.size() >= kMinValuesForClipping) {
    p.clip_lo = stats::percentile(raw, 100.0 * kClipFraction);
    p.clip_hi = stats::percentile(raw, 100.0 * (1.0 - kClipFraction));
  } else {
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    p.clip_lo = *lo;
    p.clip_hi = *hi;
  }
  // Clipping to percentiles of the data leaves exactly these as the extremes.
  p.min = p.clip_lo;
  p.max = p.clip_hi;
  return p;
}

double scale(double raw, const ScalerParams& params) {
  if (!(params.max > params.min)) return 0.5;
  const double clipped = std::clamp(raw, params.clip_lo, params.clip_hi);
  return std::clamp((clipped - params.min) / (params.max - params.min), 0.0, 1.0);
}

std::vector<double> length_column(const Dataset& dataset) {
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset.instances) out.push_back(compute_length(inst));
  return out;
}

bool noise_computable(const Dataset& dataset) {
  return std::all_of(dataset.instances.begin(), dataset.instances.end(),
                     [](const Instance& i) { return i.annotator_labels.size() >= 2; });
}

std::vector<double> noise_column(const Dataset& dataset) {
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset.instances) out.push_back(compute_noise(inst));
  return out;
}

std::vector<double> ambiguity_column(const Dataset& dataset, std::span<const TraceRecord> traces) {
  return join_column(dataset, traces, "trace", [](const TraceRecord& r) { return compute_ambiguity(r); });
}

std::vector<double> difficulty_column(const Dataset& dataset, std::span<const PviRecord> records) {
  return join_column(dataset, records, "pvi", [](const PviRecord& r) { return compute_difficulty(r); });
}

std::vector<double> perplexity_column(const Dataset& dataset,
                                      std::span<const PerplexityRecord> records) {
  return join_column(dataset, records, "perplexity",
                     [](const PerplexityRecord& r) { return compute_perplexity(r); });
}

std::vector<double> ingested_column(const Dataset& dataset, std::span<const ColumnRecord> records) {
  return join_column(dataset, records, "column", [](const ColumnRecord& r) { return r.value; });
}

FeatureTable assemble_table(std::vector<std::string> ids,
                            std::array<std::optional<RawColumn>, kNumDimensions> columns) {
  FeatureTable table;
  table.ids = std::move(ids);
  for (Dimension d : kAllDimensions) {
    auto& src = columns[static_cast<std::size_t>(d)];
    if (!src) throw ValidationError(std::string(to_string(d)) + " unavailable");
    if (src->values.size() != table.ids.size()) {
      throw ValidationError(std::string(to_string(d)) + " column has " +
                            std::to_string(src->values.size()) + " values for " +
                            std::to_string(table.ids.size()) + " instances");
    }
    auto& col = table.column(d);
    col.raw = std::move(src->values);
    col.provenance = src->provenance;
    if (col.raw.empty()) continue;
    col.scaler = fit_scaler(col.raw);
    col.scaled.reserve(col.raw.size());
    for (double v : col.raw) col.scaled.push_back(scale(v, col.scaler));
  }
  table.validate();
  return table;
}

CorrelationMatrix correlation_matrix(const FeatureTable& table) {
  CorrelationMatrix out{};
  const std::size_t n = table.size();
  std::array<double, kNumDimensions> mean{}, sd{};
  for (Dimension d : kAllDimensions) {
    const auto k = static_cast<std::size_t>(d);
    if (n > 0) {
      mean[k] = stats::mean(table.column(d).scaled);
      sd[k] = stats::population_sd(table.column(d).scaled);
    }
  }
  for (std::size_t a = 0; a < kNumDimensions; ++a) {
    for (std::size_t b = 0; b < kNumDimensions; ++b) {
      if (n < 2 || sd[a] == 0.0 || sd[b] == 0.0) continue;
      const auto& xa = table.columns[a].scaled;
      const auto& xb = table.columns[b].scaled;
      double cov = 0.0;
      for (std::size_t i = 0; i < n; ++i) cov += (xa[i] - mean[a]) * (xb[i] - mean[b]);
      cov /= static_cast<double>(n);
      out[a][b] = std::clamp(cov / (sd[a] * sd[b]), -1.0, 1.0);
    }
  }
  return out;
}

}  // namespace dataprism::features
